//! Table-driven mock backend: a deterministic oracle for tests and
//! runnable examples.
//!
//! The model is a conditional probability table keyed by exact context
//! text. The context for scoring/generation starts as the prompt string
//! and grows by direct concatenation of emitted/consumed token strings,
//! so table keys are plain strings that can be written out by hand.
//!
//! Probability rules per context:
//! * tokens declared in the context's row use their declared probability;
//! * remaining mass is spread uniformly over the undeclared vocab tokens;
//! * a context with no row is uniform over the whole vocab.

use std::collections::HashMap;

use crate::error::AttrError;
use crate::model::{Capabilities, Generation, ScoredSequence, TextModel};

#[derive(Debug, Clone)]
pub struct MockModel {
    id: String,
    /// Token id = index in this list; greedy ties resolve to the lowest.
    vocab: Vec<String>,
    table: HashMap<String, Vec<(usize, f64)>>,
    /// Generation stops when this token wins the argmax.
    eos: Option<String>,
}

impl MockModel {
    /// Builds the model, validating that every declared row leaves
    /// non-negative fallback mass (and sums to 1 when it covers the whole
    /// vocab).
    pub fn new<S: Into<String>>(
        id: &str,
        vocab: Vec<S>,
        table: Vec<(&str, Vec<(&str, f64)>)>,
        eos: Option<&str>,
    ) -> Result<Self, AttrError> {
        let vocab: Vec<String> = vocab.into_iter().map(Into::into).collect();
        if vocab.is_empty() {
            return Err(AttrError::InvalidArg("mock vocab must be non-empty".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &vocab {
            if t.is_empty() {
                return Err(AttrError::InvalidArg("empty string in mock vocab".into()));
            }
            if !seen.insert(t.clone()) {
                return Err(AttrError::InvalidArg(format!("duplicate vocab token '{t}'")));
            }
        }
        let index_of = |tok: &str| -> Result<usize, AttrError> {
            vocab.iter().position(|v| v == tok).ok_or_else(|| {
                AttrError::Vocabulary(format!("token '{tok}' not in mock vocab"))
            })
        };
        let mut rows = HashMap::new();
        for (ctx, entries) in table {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            let mut sum = 0.0;
            for (tok, p) in entries {
                if !(0.0..=1.0).contains(&p) {
                    return Err(AttrError::InvalidArg(format!(
                        "probability {p} for token '{tok}' out of [0, 1]"
                    )));
                }
                let id = index_of(tok)?;
                if row.iter().any(|(i, _)| *i == id) {
                    return Err(AttrError::InvalidArg(format!(
                        "token '{tok}' declared twice for one context"
                    )));
                }
                row.push((id, p));
                sum += p;
            }
            let undeclared = vocab.len() - row.len();
            if undeclared == 0 {
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(AttrError::InvalidArg(format!(
                        "context row covers the whole vocab but sums to {sum}"
                    )));
                }
            } else if sum > 1.0 + 1e-9 {
                return Err(AttrError::InvalidArg(format!(
                    "context row probabilities sum to {sum} > 1"
                )));
            }
            rows.insert(ctx.to_string(), row);
        }
        let eos = match eos {
            Some(tok) => Some(vocab[index_of(tok)?].clone()),
            None => None,
        };
        Ok(MockModel { id: id.to_string(), vocab, table: rows, eos })
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Probability of each vocab token given a context string.
    fn distribution(&self, context: &str) -> Vec<f64> {
        let n = self.vocab.len();
        match self.table.get(context) {
            None => vec![1.0 / n as f64; n],
            Some(row) => {
                let declared_sum: f64 = row.iter().map(|(_, p)| p).sum();
                let undeclared = n - row.len();
                let fallback = if undeclared == 0 {
                    0.0
                } else {
                    ((1.0 - declared_sum).max(0.0)) / undeclared as f64
                };
                let mut probs = vec![fallback; n];
                for &(id, p) in row {
                    probs[id] = p;
                }
                probs
            }
        }
    }

    /// Greedy longest-match tokenization against the vocab.
    fn tokenize_greedy(&self, text: &str) -> Result<Vec<String>, AttrError> {
        let mut tokens = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .vocab
                .iter()
                .filter(|v| rest.starts_with(v.as_str()))
                .max_by_key(|v| v.len());
            match best {
                Some(tok) => {
                    tokens.push(tok.clone());
                    rest = &rest[tok.len()..];
                }
                None => {
                    return Err(AttrError::Tokenize(format!(
                        "no vocab token matches at '{}'",
                        rest.chars().take(12).collect::<String>()
                    )))
                }
            }
        }
        Ok(tokens)
    }
}

impl TextModel for MockModel {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            scores_targets: true,
            generates: true,
            exposes_logits: true,
            exposes_gradients: false,
        }
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, AttrError> {
        self.tokenize_greedy(text)
    }

    fn score_target(&self, prompt: &str, target: &str) -> Result<ScoredSequence, AttrError> {
        if target.is_empty() {
            return Ok(ScoredSequence::empty());
        }
        let tokens = self.tokenize_greedy(target)?;
        let mut context = prompt.to_string();
        let mut logprobs = Vec::with_capacity(tokens.len());
        for tok in &tokens {
            let probs = self.distribution(&context);
            let id = self.vocab.iter().position(|v| v == tok).expect("token from vocab");
            let p = probs[id];
            if p <= 0.0 {
                return Err(AttrError::Backend(format!(
                    "token '{tok}' has probability 0 in context '{context}'"
                )));
            }
            logprobs.push(p.ln());
            context.push_str(tok);
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
        let mut context = prompt.to_string();
        let mut tokens = Vec::new();
        let mut logprobs = Vec::new();
        for _ in 0..max_tokens {
            let probs = self.distribution(&context);
            // First maximum wins, so ties resolve to the lowest token id.
            let mut best = 0;
            for (i, &p) in probs.iter().enumerate() {
                if p > probs[best] {
                    best = i;
                }
            }
            let tok = &self.vocab[best];
            if Some(tok) == self.eos.as_ref() {
                break;
            }
            if let Some(stops) = stop {
                if stops.iter().any(|s| s == tok) {
                    break;
                }
            }
            tokens.push(tok.clone());
            logprobs.push(probs[best].ln());
            context.push_str(tok);
        }
        let text = tokens.concat();
        Ok(Generation { text, seq: ScoredSequence::new(tokens, logprobs) })
    }

    fn next_token_distribution(&self, prompt: &str) -> Result<Vec<(String, f64)>, AttrError> {
        let probs = self.distribution(prompt);
        Ok(self.vocab.iter().cloned().zip(probs).collect())
    }
}
