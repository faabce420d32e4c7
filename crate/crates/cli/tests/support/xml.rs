//! Minimal XML well-formedness checker for rendered SVG documents.
//!
//! Validates tag nesting, attribute quoting, and entity syntax; it is not
//! a general XML parser, just enough structure to catch malformed output.

/// Returns Err with a description if `text` is not well-formed XML.
pub fn check_well_formed(text: &str) -> Result<(), String> {
    let bytes = text.as_bytes();
    let mut stack: Vec<String> = Vec::new();
    let mut elements = 0usize;
    let mut i = 0usize;
    while i < bytes.len() {
        match bytes[i] {
            b'<' => {
                if text[i..].starts_with("<!--") {
                    i = text[i..]
                        .find("-->")
                        .map(|p| i + p + 3)
                        .ok_or("unterminated comment")?;
                } else if text[i..].starts_with("<?") {
                    i = text[i..]
                        .find("?>")
                        .map(|p| i + p + 2)
                        .ok_or("unterminated processing instruction")?;
                } else if text[i..].starts_with("<!") {
                    i = text[i..].find('>').map(|p| i + p + 1).ok_or("unterminated doctype")?;
                } else if text[i..].starts_with("</") {
                    let end = text[i..].find('>').map(|p| i + p).ok_or("unterminated close tag")?;
                    let name = text[i + 2..end].trim();
                    match stack.pop() {
                        Some(open) if open == name => {}
                        Some(open) => return Err(format!("</{name}> closes <{open}>")),
                        None => return Err(format!("</{name}> with nothing open")),
                    }
                    i = end + 1;
                } else {
                    let (name, after) = read_name(text, i + 1)?;
                    let end = scan_attributes(text, after)?;
                    if text[..end].ends_with('/') {
                        elements += 1; // self-closing
                    } else {
                        stack.push(name);
                        elements += 1;
                    }
                    i = end + 1;
                }
            }
            b'>' => return Err(format!("stray '>' at byte {i}")),
            b'&' => {
                i = check_entity(text, i)?;
            }
            _ => i += 1,
        }
    }
    if let Some(open) = stack.pop() {
        return Err(format!("<{open}> never closed"));
    }
    if elements == 0 {
        return Err("no elements".into());
    }
    Ok(())
}

fn read_name(text: &str, start: usize) -> Result<(String, usize), String> {
    let rest = &text[start..];
    let len = rest
        .char_indices()
        .find(|(_, c)| !(c.is_alphanumeric() || *c == '-' || *c == '_' || *c == ':'))
        .map(|(p, _)| p)
        .unwrap_or(rest.len());
    if len == 0 {
        return Err(format!("missing tag name at byte {start}"));
    }
    Ok((rest[..len].to_string(), start + len))
}

/// Scan from after the tag name to the closing '>', validating that
/// attribute values are quoted and contain no raw '<'.
fn scan_attributes(text: &str, mut i: usize) -> Result<usize, String> {
    let bytes = text.as_bytes();
    while i < bytes.len() {
        match bytes[i] {
            b'>' => return Ok(i),
            b'"' | b'\'' => {
                let quote = bytes[i];
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != quote {
                    if bytes[j] == b'<' {
                        return Err(format!("raw '<' inside attribute at byte {j}"));
                    }
                    if bytes[j] == b'&' {
                        j = check_entity(text, j)?;
                        continue;
                    }
                    j += 1;
                }
                if j >= bytes.len() {
                    return Err("unterminated attribute value".into());
                }
                i = j + 1;
            }
            b'<' => return Err(format!("raw '<' inside tag at byte {i}")),
            _ => i += 1,
        }
    }
    Err("unterminated tag".into())
}

/// Validate an entity starting at the '&'; returns the index after ';'.
fn check_entity(text: &str, start: usize) -> Result<usize, String> {
    let rest = &text[start..];
    let semi = rest.find(';').ok_or(format!("unterminated entity at byte {start}"))?;
    let body = &rest[1..semi];
    let valid = matches!(body, "amp" | "lt" | "gt" | "quot" | "apos")
        || (body.starts_with("#x") && body[2..].chars().all(|c| c.is_ascii_hexdigit()))
        || (body.starts_with('#')
            && !body.starts_with("#x")
            && body[1..].chars().all(|c| c.is_ascii_digit())
            && body.len() > 1);
    if !valid || body.is_empty() {
        return Err(format!("invalid entity '&{body};'"));
    }
    Ok(start + semi + 1)
}
