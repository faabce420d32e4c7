//! Subprocess backend: line-delimited JSON over a child's stdin/stdout.
//!
//! Any model runtime can be attached by speaking three request shapes,
//! one JSON object per line:
//!
//! * `{"op":"score","prompt":p,"continuation":c}` →
//!   `{"tokens":[...],"token_logprobs":[...]}`
//! * `{"op":"generate","prompt":p,"max_tokens":n}` →
//!   `{"text":t,"tokens":[...],"token_logprobs":[...]}`
//! * `{"op":"tokenize","text":t}` → `{"tokens":[...]}`
//!
//! A child reports failure as `{"error":"..."}`. Exactly one request is
//! in flight at a time; concurrent callers queue on an internal lock. The
//! child is killed when the handle drops.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde_json::{json, Value};

use crate::error::AttrError;
use crate::model::{Capabilities, Generation, ScoredSequence, TextModel};

struct ChildIo {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

pub struct SubprocessModel {
    io: Mutex<ChildIo>,
    command: String,
}

impl SubprocessModel {
    /// Spawn the child process; its stderr passes through for
    /// diagnostics.
    pub fn spawn(command: &str, args: &[String]) -> Result<Self, AttrError> {
        let mut child = Command::new(command)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| AttrError::Transport(format!("spawning '{command}': {e}")))?;
        let stdin = child.stdin.take().expect("stdin piped");
        let stdout = BufReader::new(child.stdout.take().expect("stdout piped"));
        Ok(SubprocessModel {
            io: Mutex::new(ChildIo { child, stdin, stdout }),
            command: command.to_string(),
        })
    }

    /// One request/response exchange. The protocol is strictly
    /// synchronous, so the lock spans write and read.
    fn request(&self, request: Value) -> Result<Value, AttrError> {
        let mut io = self.io.lock().expect("subprocess lock");
        let line = request.to_string();
        io.stdin
            .write_all(line.as_bytes())
            .and_then(|_| io.stdin.write_all(b"\n"))
            .and_then(|_| io.stdin.flush())
            .map_err(|e| AttrError::Transport(format!("writing to '{}': {e}", self.command)))?;
        let mut reply = String::new();
        let n = io
            .stdout
            .read_line(&mut reply)
            .map_err(|e| AttrError::Transport(format!("reading from '{}': {e}", self.command)))?;
        if n == 0 {
            return Err(AttrError::Transport(format!(
                "'{}' closed its stdout mid-protocol",
                self.command
            )));
        }
        let value: Value = serde_json::from_str(&reply).map_err(|e| {
            AttrError::Transport(format!("'{}' sent malformed JSON: {e}", self.command))
        })?;
        if let Some(msg) = value.get("error").and_then(Value::as_str) {
            return Err(AttrError::Backend(format!("'{}': {msg}", self.command)));
        }
        Ok(value)
    }

    fn string_list(value: &Value, field: &str) -> Result<Vec<String>, AttrError> {
        value
            .get(field)
            .and_then(Value::as_array)
            .map(|a| a.iter().map(|v| v.as_str().unwrap_or_default().to_string()).collect())
            .ok_or_else(|| AttrError::Backend(format!("reply missing '{field}' list")))
    }

    fn float_list(value: &Value, field: &str) -> Result<Vec<f64>, AttrError> {
        let arr = value
            .get(field)
            .and_then(Value::as_array)
            .ok_or_else(|| AttrError::Backend(format!("reply missing '{field}' list")))?;
        arr.iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| AttrError::Backend(format!("non-numeric entry in '{field}'")))
            })
            .collect()
    }

    fn scored(value: &Value) -> Result<ScoredSequence, AttrError> {
        let tokens = Self::string_list(value, "tokens")?;
        let logprobs = Self::float_list(value, "token_logprobs")?;
        if tokens.len() != logprobs.len() {
            return Err(AttrError::Backend(format!(
                "tokens/token_logprobs length mismatch: {} vs {}",
                tokens.len(),
                logprobs.len()
            )));
        }
        Ok(ScoredSequence::new(tokens, logprobs))
    }
}

impl Drop for SubprocessModel {
    fn drop(&mut self) {
        if let Ok(io) = self.io.get_mut() {
            let _ = io.child.kill();
            let _ = io.child.wait();
        }
    }
}

impl TextModel for SubprocessModel {
    fn id(&self) -> String {
        format!("subprocess:{}", self.command)
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            scores_targets: true,
            generates: true,
            exposes_logits: false,
            exposes_gradients: false,
        }
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, AttrError> {
        let reply = self.request(json!({"op": "tokenize", "text": text}))?;
        Self::string_list(&reply, "tokens")
    }

    fn score_target(&self, prompt: &str, target: &str) -> Result<ScoredSequence, AttrError> {
        if target.is_empty() {
            return Ok(ScoredSequence::empty());
        }
        let reply =
            self.request(json!({"op": "score", "prompt": prompt, "continuation": target}))?;
        Self::scored(&reply)
    }

    fn generate_greedy(
        &self,
        prompt: &str,
        max_tokens: usize,
        stop: Option<&[String]>,
    ) -> Result<Generation, AttrError> {
        if max_tokens == 0 {
            return Err(AttrError::InvalidArg("max_tokens must be at least 1".into()));
        }
        if stop.is_some_and(|s| !s.is_empty()) {
            return Err(AttrError::InvalidArg(
                "the subprocess protocol has no stop-token support".into(),
            ));
        }
        let reply =
            self.request(json!({"op": "generate", "prompt": prompt, "max_tokens": max_tokens}))?;
        let text = reply
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| AttrError::Backend("generate reply missing 'text'".into()))?
            .to_string();
        Ok(Generation { text, seq: Self::scored(&reply)? })
    }

    fn next_token_distribution(&self, _prompt: &str) -> Result<Vec<(String, f64)>, AttrError> {
        Err(AttrError::Capability { model: self.id(), needed: "output distributions".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Shell child answering each op with a canned reply.
    fn canned_child() -> SubprocessModel {
        let script = r#"
while IFS= read -r line; do
  case "$line" in
    *'"op":"score"'*) printf '{"tokens":["x","y"],"token_logprobs":[-0.1,-0.2]}\n';;
    *'"op":"generate"'*) printf '{"text":"hi","tokens":["hi"],"token_logprobs":[-0.3]}\n';;
    *'"op":"tokenize"'*) printf '{"tokens":["t1","t2"]}\n';;
    *) printf '{"error":"unknown op"}\n';;
  esac
done
"#;
        SubprocessModel::spawn("sh", &["-c".to_string(), script.to_string()]).unwrap()
    }

    #[test]
    fn protocol_round_trips_all_ops() {
        let m = canned_child();
        let s = m.score_target("p", "xy").unwrap();
        assert_eq!(s.tokens, vec!["x", "y"]);
        assert!((s.total_logprob - (-0.3)).abs() < 1e-12);
        let g = m.generate_greedy("p", 2, None).unwrap();
        assert_eq!(g.text, "hi");
        assert_eq!(g.seq.tokens, vec!["hi"]);
        assert_eq!(m.tokenize("t1 t2").unwrap(), vec!["t1", "t2"]);
    }

    #[test]
    fn child_error_reply_surfaces_as_backend_error() {
        let script = r#"while IFS= read -r line; do printf '{"error":"boom"}\n'; done"#;
        let m = SubprocessModel::spawn("sh", &["-c".to_string(), script.to_string()]).unwrap();
        let err = m.score_target("p", "t").unwrap_err();
        assert!(err.to_string().contains("boom"), "{err}");
        assert!(matches!(err, AttrError::Backend(_)));
    }

    #[test]
    fn child_exit_is_a_transport_error() {
        let m = SubprocessModel::spawn("sh", &["-c".to_string(), "exit 0".to_string()]).unwrap();
        let err = m.score_target("p", "t").unwrap_err();
        assert!(matches!(err, AttrError::Transport(_)), "{err:?}");
    }

    #[test]
    fn mismatched_reply_lengths_are_rejected() {
        let script =
            r#"while IFS= read -r line; do printf '{"tokens":["a","b"],"token_logprobs":[-0.1]}\n'; done"#;
        let m = SubprocessModel::spawn("sh", &["-c".to_string(), script.to_string()]).unwrap();
        let err = m.score_target("p", "ab").unwrap_err();
        assert!(matches!(err, AttrError::Backend(_)), "{err:?}");
    }

    #[test]
    fn stop_tokens_are_rejected_up_front() {
        let m = canned_child();
        let err = m.generate_greedy("p", 2, Some(&["\n".to_string()])).unwrap_err();
        assert!(matches!(err, AttrError::InvalidArg(_)), "{err:?}");
    }

    #[test]
    fn empty_target_never_reaches_the_child() {
        // A child that fails on any request proves no request was sent.
        let m = SubprocessModel::spawn("sh", &["-c".to_string(), "exit 0".to_string()]).unwrap();
        let s = m.score_target("p", "").unwrap();
        assert!(s.tokens.is_empty());
    }

    #[test]
    fn missing_command_fails_at_spawn() {
        let err = SubprocessModel::spawn("/nonexistent/model-binary", &[]).err().unwrap();
        assert!(matches!(err, AttrError::Transport(_)), "{err:?}");
    }
}
