//! Reference subprocess-protocol child: the built-in toy LM behind
//! line-delimited JSON on stdin/stdout.
//!
//! Speaks the protocol the subprocess backend expects: one request
//! object per line (`score`, `generate`, `tokenize`), one response line
//! each, failures as `{"error":"..."}`. Exists so the wire adapter has a
//! real in-repo counterpart, and doubles as a template for wrapping an
//! actual model runtime.

use std::io::{BufRead, Write};

use clap::Parser;
use serde_json::{json, Value};

use lmattr::model::TextModel;
use lmattr::toylm::ToyLM;

#[derive(Parser)]
#[command(name = "lmattr-toylm-stdio", about = "Toy LM speaking the subprocess protocol")]
struct Args {
    /// Parameter seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Embedding width.
    #[arg(long, default_value_t = 16)]
    embedding_dim: usize,
    /// Comma-separated vocabulary (<unk> is appended automatically).
    #[arg(long, default_value = "the,sun,rain,wind,snow,fog")]
    vocab: String,
}

fn respond(model: &ToyLM, request: &Value) -> Value {
    let text_field = |field: &str| -> Option<&str> { request.get(field).and_then(Value::as_str) };
    match request.get("op").and_then(Value::as_str) {
        Some("score") => {
            let (Some(prompt), Some(continuation)) =
                (text_field("prompt"), text_field("continuation"))
            else {
                return json!({"error": "score needs string fields 'prompt' and 'continuation'"});
            };
            match model.score_target(prompt, continuation) {
                Ok(s) => json!({"tokens": s.tokens, "token_logprobs": s.token_logprobs}),
                Err(e) => json!({"error": e.to_string()}),
            }
        }
        Some("generate") => {
            let Some(prompt) = text_field("prompt") else {
                return json!({"error": "generate needs a string field 'prompt'"});
            };
            let Some(max_tokens) = request.get("max_tokens").and_then(Value::as_u64) else {
                return json!({"error": "generate needs an integer field 'max_tokens'"});
            };
            match model.generate_greedy(prompt, max_tokens as usize, None) {
                Ok(g) => json!({
                    "text": g.text,
                    "tokens": g.seq.tokens,
                    "token_logprobs": g.seq.token_logprobs,
                }),
                Err(e) => json!({"error": e.to_string()}),
            }
        }
        Some("tokenize") => {
            let Some(text) = text_field("text") else {
                return json!({"error": "tokenize needs a string field 'text'"});
            };
            match model.tokenize(text) {
                Ok(tokens) => json!({"tokens": tokens}),
                Err(e) => json!({"error": e.to_string()}),
            }
        }
        Some(other) => json!({"error": format!("unknown op '{other}'")}),
        None => json!({"error": "request needs a string field 'op'"}),
    }
}

fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let vocab: Vec<String> = args.vocab.split(',').map(str::to_string).collect();
    let model = match ToyLM::seeded(vocab, args.embedding_dim, args.seed) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    let stdin = std::io::stdin();
    let mut stdout = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serde_json::from_str::<Value>(&line) {
            Ok(request) => respond(&model, &request),
            Err(e) => json!({"error": format!("malformed request: {e}")}),
        };
        serde_json::to_writer(&mut stdout, &reply)?;
        stdout.write_all(b"\n")?;
        stdout.flush()?;
    }
    Ok(())
}
