//! Rendering of attribution results: SVG/HTML heatmaps and an aligned
//! terminal table.
//!
//! Orientation is shared by every format: feature labels run across the
//! top, target token labels down the left side, one cell per
//! (target, feature) score. Cells are colored from a diverging map
//! centered at zero (negative red, positive blue by default) with the
//! scale bounds at the largest absolute score, so +max and -max are
//! equally saturated. All renderers are pure functions; fixed input and
//! options give byte-identical output.

use crate::error::AttrError;
use crate::orchestrate::AttributionResult;

/// Diverging color map as its two full-saturation endpoints; values
/// interpolate linearly from white at zero. The default maps negative
/// scores to red and positive to blue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivergingMap {
    pub negative: (u8, u8, u8),
    pub positive: (u8, u8, u8),
}

impl Default for DivergingMap {
    fn default() -> Self {
        DivergingMap { negative: (255, 0, 0), positive: (0, 0, 255) }
    }
}

impl DivergingMap {
    /// Color for a normalized score t in [-1, 1]; out-of-range values
    /// clamp to the endpoints.
    pub fn at(&self, t: f64) -> (u8, u8, u8) {
        let t = t.clamp(-1.0, 1.0);
        let endpoint = if t < 0.0 { self.negative } else { self.positive };
        let mix = |c: u8| -> u8 {
            let white = 255.0;
            (white + t.abs() * (c as f64 - white)).round() as u8
        };
        (mix(endpoint.0), mix(endpoint.1), mix(endpoint.2))
    }
}

/// Geometry and formatting knobs for the SVG heatmap.
#[derive(Debug, Clone)]
pub struct HeatmapOptions {
    /// Minimum cell width in pixels; columns grow to fit their content.
    pub cell_width: u32,
    pub cell_height: u32,
    /// Decimal places for in-cell value annotations.
    pub precision: usize,
    pub colors: DivergingMap,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        HeatmapOptions {
            cell_width: 72,
            cell_height: 34,
            precision: 4,
            colors: DivergingMap::default(),
        }
    }
}

const FONT_SIZE: u32 = 12;
// Monospace advance width for the 12px font, used to size columns.
const CHAR_W: u32 = 8;
const PAD: u32 = 16;

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn feature_label(features: &[String], index: usize) -> String {
    let label = &features[index];
    if label.is_empty() {
        format!("(feature {index})")
    } else {
        label.clone()
    }
}

/// Largest absolute finite score; the symmetric color scale bound.
fn scale_bound(matrix: &[Vec<f64>]) -> f64 {
    let max = matrix.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        1.0
    } else {
        max
    }
}

/// Rejects non-finite scores, naming the offending cell by its labels.
fn check_finite(result: &AttributionResult) -> Result<(), AttrError> {
    for (r, row) in result.matrix.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(AttrError::Render(format!(
                    "score at cell ({}, {}) is {v}",
                    result.target_tokens.get(r).map(String::as_str).unwrap_or("?"),
                    result.features.get(c).map(String::as_str).unwrap_or("?"),
                )));
            }
        }
    }
    Ok(())
}

/// Perceived luminance in [0, 1]; decides black or white cell text.
fn luminance((r, g, b): (u8, u8, u8)) -> f64 {
    (0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64) / 255.0
}

/// Render the score matrix as a standalone SVG heatmap. Feature labels
/// run across the top, target token labels down the left, and every cell
/// shows its value at the configured precision over the diverging fill.
pub fn render_heatmap(
    result: &AttributionResult,
    options: &HeatmapOptions,
) -> Result<String, AttrError> {
    if result.matrix.is_empty() || result.features.is_empty() {
        return Err(AttrError::Render("empty matrix: nothing to draw".into()));
    }
    if result.matrix.len() != result.target_tokens.len()
        || result.matrix.iter().any(|row| row.len() != result.features.len())
    {
        return Err(AttrError::Render("matrix does not match its labels".into()));
    }
    check_finite(result)?;

    let bound = scale_bound(&result.matrix);
    let rows = result.matrix.len();
    let cols = result.features.len();
    let prec = options.precision;

    let fmt = |v: f64| format!("{v:.prec$}");
    let chars = |s: &str| s.chars().count() as u32;

    // Per-column width: the widest of the header and the column's values.
    let col_widths: Vec<u32> = (0..cols)
        .map(|c| {
            let header = chars(&feature_label(&result.features, c));
            let widest = result
                .matrix
                .iter()
                .map(|row| chars(&fmt(row[c])))
                .max()
                .unwrap_or(0)
                .max(header);
            options.cell_width.max(widest * CHAR_W + PAD)
        })
        .collect();
    let label_col = result
        .target_tokens
        .iter()
        .map(|t| chars(t))
        .max()
        .unwrap_or(0)
        .max(1)
        * CHAR_W
        + PAD;

    let width: u32 = label_col + col_widths.iter().sum::<u32>();
    let height: u32 = (rows as u32 + 1) * options.cell_height;
    let ch = options.cell_height;
    let mid = ch / 2;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"{FONT_SIZE}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{width}\" height=\"{height}\" fill=\"rgb(255,255,255)\"/>\n"
    ));

    // Header row: feature labels centered over their columns.
    let mut x = label_col;
    for c in 0..cols {
        let cx = x + col_widths[c] / 2;
        svg.push_str(&format!(
            "  <text x=\"{cx}\" y=\"{mid}\" text-anchor=\"middle\" \
             dominant-baseline=\"central\" fill=\"rgb(0,0,0)\">{}</text>\n",
            escape_xml(&feature_label(&result.features, c))
        ));
        x += col_widths[c];
    }

    for (r, row) in result.matrix.iter().enumerate() {
        let y = (r as u32 + 1) * ch;
        // Target label, right-aligned against the grid.
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\" \
             dominant-baseline=\"central\" fill=\"rgb(0,0,0)\">{}</text>\n",
            label_col - PAD / 2,
            y + mid,
            escape_xml(&result.target_tokens[r])
        ));
        let mut x = label_col;
        for (c, &v) in row.iter().enumerate() {
            let fill = options.colors.at(v / bound);
            let text = if luminance(fill) < 0.5 { (255, 255, 255) } else { (0, 0, 0) };
            let w = col_widths[c];
            svg.push_str(&format!(
                "  <rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{ch}\" \
                 fill=\"rgb({},{},{})\" stroke=\"rgb(200,200,200)\"/>\n",
                fill.0, fill.1, fill.2
            ));
            svg.push_str(&format!(
                "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" \
                 dominant-baseline=\"central\" fill=\"rgb({},{},{})\">{}</text>\n",
                x + w / 2,
                y + mid,
                text.0,
                text.1,
                text.2,
                escape_xml(&fmt(v))
            ));
            x += w;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render the result as a fixed-width text table in the heatmap's
/// orientation, with a totals row appended. Never fails; non-finite
/// values print as their float representation.
pub fn render_terminal(result: &AttributionResult) -> String {
    let cols = result.features.len();
    let fmt = |v: f64| format!("{v:.4}");
    let chars = |s: &str| s.chars().count();

    let headers: Vec<String> = (0..cols).map(|c| feature_label(&result.features, c)).collect();
    let body: Vec<Vec<String>> =
        result.matrix.iter().map(|row| row.iter().map(|&v| fmt(v)).collect()).collect();
    let totals: Vec<String> = result.totals.iter().map(|&v| fmt(v)).collect();

    let label_width = result
        .target_tokens
        .iter()
        .map(|t| chars(t))
        .max()
        .unwrap_or(0)
        .max(chars("total"));
    let col_widths: Vec<usize> = (0..cols)
        .map(|c| {
            let mut w = chars(&headers[c]);
            for row in &body {
                w = w.max(chars(&row[c]));
            }
            if let Some(t) = totals.get(c) {
                w = w.max(chars(t));
            }
            w
        })
        .collect();

    let mut out = String::new();
    let mut push_row = |label: &str, cells: &[String]| {
        out.push_str(&format!("{label:<label_width$}"));
        for (c, cell) in cells.iter().enumerate() {
            out.push_str(&format!("  {cell:>width$}", width = col_widths[c]));
        }
        // Rows narrower than the header (missing totals) still end clean.
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    };

    push_row("", &headers);
    for (r, row) in body.iter().enumerate() {
        push_row(&result.target_tokens[r], row);
    }
    push_row("total", &totals);
    out
}

/// Wrap the SVG heatmap in a minimal static HTML page with a one-line
/// caption of the run metadata. No scripting; the output is a document.
pub fn render_html(
    result: &AttributionResult,
    options: &HeatmapOptions,
) -> Result<String, AttrError> {
    let svg = render_heatmap(result, options)?;
    let caption = format!(
        "method {}, model {}, seed {}, {} evaluations",
        result.meta.method, result.meta.model, result.meta.seed, result.meta.evaluations
    );
    Ok(format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n\
         <title>attribution heatmap</title>\n</head>\n<body>\n{svg}\
         <p>{}</p>\n</body>\n</html>\n",
        escape_xml(&caption)
    ))
}
