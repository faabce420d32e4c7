//! OpenAI-compatible HTTP backend.
//!
//! Target scoring uses echo-mode completion scoring: request prompt +
//! target with `max_tokens = 0`, `echo = true`, and `logprobs = 0`, then
//! select the target's tokens by character offset. No separator is
//! inserted at the prompt/target seam; a token belongs to the target iff
//! its start offset is at or past the prompt's byte length, so a token
//! merged across the seam counts toward the prompt.
//!
//! Scoring requests are idempotent and retried up to [`MAX_RETRIES`]
//! times with exponential backoff. Generation requests are retried only
//! on connection-level failures, never on HTTP errors after bytes were
//! received (the server may have committed work).

use std::io::Read;
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::error::AttrError;
use crate::model::{Capabilities, Generation, ScoredSequence, TextModel};

/// Retries after the initial attempt, for idempotent requests.
const MAX_RETRIES: u32 = 3;
/// First backoff pause; doubles per retry.
const BACKOFF_BASE: Duration = Duration::from_millis(500);
/// Per-request timeout unless overridden.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);
/// Environment variable holding the bearer token, if the server needs one.
pub const API_KEY_ENV: &str = "LM_ATTR_API_KEY";

pub struct HttpModel {
    agent: ureq::Agent,
    base_url: String,
    model: String,
    api_key: Option<String>,
}

#[derive(Deserialize)]
struct CompletionResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    #[serde(default)]
    text: String,
    logprobs: Option<Logprobs>,
}

#[derive(Deserialize)]
struct Logprobs {
    tokens: Vec<String>,
    token_logprobs: Vec<Option<f64>>,
    #[serde(default)]
    text_offset: Vec<usize>,
}

/// Failures where no response bytes arrived, safe to retry universally.
fn is_connection_error(err: &ureq::Error) -> bool {
    matches!(
        err,
        ureq::Error::Io(_)
            | ureq::Error::Timeout(_)
            | ureq::Error::HostNotFound
            | ureq::Error::ConnectionFailed
    )
}

impl HttpModel {
    /// Backend at `base_url` (e.g. `http://localhost:8000/v1`) scoring
    /// with the named model. The bearer token is read from
    /// [`API_KEY_ENV`] if present.
    pub fn new(base_url: &str, model: &str) -> Self {
        Self::with_timeout(base_url, model, DEFAULT_TIMEOUT)
    }

    pub fn with_timeout(base_url: &str, model: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .new_agent();
        HttpModel {
            agent,
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key: std::env::var(API_KEY_ENV).ok(),
        }
    }

    /// Override the bearer token (None disables authentication).
    pub fn with_api_key(mut self, key: Option<String>) -> Self {
        self.api_key = key;
        self
    }

    fn post_once(&self, body: &str) -> Result<CompletionResponse, ureq::Error> {
        let url = format!("{}/completions", self.base_url);
        let mut req = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send(body.as_bytes())?;
        let mut text = String::new();
        resp.body_mut().as_reader().read_to_string(&mut text)?;
        serde_json::from_str(&text).map_err(|e| {
            ureq::Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("malformed completion response: {e}"),
            ))
        })
    }

    /// POST with retries. `retry_http_errors` distinguishes idempotent
    /// scoring (retry everything) from generation (connection errors
    /// only).
    fn post(&self, body: &str, retry_http_errors: bool) -> Result<CompletionResponse, AttrError> {
        let mut backoff = BACKOFF_BASE;
        let mut attempt = 0;
        loop {
            match self.post_once(body) {
                Ok(resp) => return Ok(resp),
                Err(err) => {
                    let retryable = retry_http_errors || is_connection_error(&err);
                    if !retryable || attempt >= MAX_RETRIES {
                        return Err(AttrError::Transport(format!(
                            "{} (after {} attempts)",
                            err,
                            attempt + 1
                        )));
                    }
                    std::thread::sleep(backoff);
                    backoff *= 2;
                    attempt += 1;
                }
            }
        }
    }

    /// Echo-score `text` and return the response's logprobs block.
    fn echo_score(&self, text: &str) -> Result<Logprobs, AttrError> {
        let body = json!({
            "model": self.model,
            "prompt": text,
            "max_tokens": 0,
            "echo": true,
            "logprobs": 0,
            "temperature": 0,
        });
        let resp = self.post(&body.to_string(), true)?;
        let choice = resp
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| AttrError::Backend("completion response has no choices".into()))?;
        let lp = choice.logprobs.ok_or_else(|| {
            AttrError::Backend("server returned no logprobs; echo scoring unsupported".into())
        })?;
        if lp.tokens.len() != lp.token_logprobs.len() || lp.tokens.len() != lp.text_offset.len() {
            return Err(AttrError::Backend(
                "logprobs fields disagree in length".into(),
            ));
        }
        Ok(lp)
    }
}

impl TextModel for HttpModel {
    fn id(&self) -> String {
        format!("http:{}", self.model)
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
        if text.is_empty() {
            return Ok(Vec::new());
        }
        Ok(self.echo_score(text)?.tokens)
    }

    fn score_target(&self, prompt: &str, target: &str) -> Result<ScoredSequence, AttrError> {
        if target.is_empty() {
            return Ok(ScoredSequence::empty());
        }
        let full = format!("{prompt}{target}");
        let lp = self.echo_score(&full)?;
        let cut = prompt.len();
        let mut tokens = Vec::new();
        let mut logprobs = Vec::new();
        for ((tok, maybe_lp), &off) in
            lp.tokens.iter().zip(&lp.token_logprobs).zip(&lp.text_offset)
        {
            if off >= cut {
                let v = maybe_lp.ok_or_else(|| {
                    AttrError::Backend(format!("missing logprob for target token '{tok}'"))
                })?;
                tokens.push(tok.clone());
                logprobs.push(v);
            }
        }
        if tokens.is_empty() {
            return Err(AttrError::Backend(
                "no tokens start inside the target span; tokenizer merged it into the prompt"
                    .into(),
            ));
        }
        Ok(ScoredSequence::new(tokens, logprobs))
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
        let mut body = json!({
            "model": self.model,
            "prompt": prompt,
            "max_tokens": max_tokens,
            "logprobs": 0,
            "temperature": 0,
        });
        if let Some(stops) = stop {
            body["stop"] = json!(stops);
        }
        let resp = self.post(&body.to_string(), false)?;
        let choice = resp
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| AttrError::Backend("completion response has no choices".into()))?;
        let seq = match choice.logprobs {
            Some(lp) => {
                let mut logprobs = Vec::with_capacity(lp.token_logprobs.len());
                for v in &lp.token_logprobs {
                    logprobs.push(v.ok_or_else(|| {
                        AttrError::Backend("missing logprob for generated token".into())
                    })?);
                }
                ScoredSequence::new(lp.tokens, logprobs)
            }
            None => ScoredSequence::empty(),
        };
        Ok(Generation { text: choice.text, seq })
    }

    fn next_token_distribution(&self, _prompt: &str) -> Result<Vec<(String, f64)>, AttrError> {
        Err(AttrError::Capability { model: self.id(), needed: "output distributions".into() })
    }
}
