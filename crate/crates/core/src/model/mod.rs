//! Uniform interface over text-model backends.
//!
//! Everything the engine needs from a model is behind [`TextModel`]:
//! tokenization, teacher-forced scoring of a continuation, greedy
//! generation, and (optionally) the next-token distribution. Backends
//! declare what they support via [`Capabilities`]; operations on missing
//! capabilities fail with a capability error instead of guessing.
//!
//! Gradient-based attribution additionally needs [`GradientModel`]
//! (embeddings and gradients of target log-probs with respect to them),
//! exposed through [`TextModel::gradients`].

mod cache;
mod http;
mod mock;
mod subprocess;

pub use cache::CachedModel;
pub use http::HttpModel;
pub use mock::MockModel;
pub use subprocess::SubprocessModel;

use crate::error::AttrError;

/// What a backend can do. Immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub scores_targets: bool,
    pub generates: bool,
    pub exposes_logits: bool,
    pub exposes_gradients: bool,
}

/// A tokenized sequence with per-token conditional log-probabilities
/// (natural log throughout) and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSequence {
    pub tokens: Vec<String>,
    pub token_logprobs: Vec<f64>,
    pub total_logprob: f64,
}

impl ScoredSequence {
    /// Builds from per-token log-probs; the total is their sum.
    pub fn new(tokens: Vec<String>, token_logprobs: Vec<f64>) -> Self {
        let total_logprob = token_logprobs.iter().sum();
        ScoredSequence { tokens, token_logprobs, total_logprob }
    }

    pub fn empty() -> Self {
        ScoredSequence { tokens: Vec::new(), token_logprobs: Vec::new(), total_logprob: 0.0 }
    }
}

/// Greedy-decode output: the decoded text plus the scored token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub text: String,
    pub seq: ScoredSequence,
}

/// Gradient access for backends with differentiable scoring.
///
/// Prompts are embedded per token; target log-probs are evaluated (and
/// differentiated) as a function of those prompt embeddings. Target-token
/// embeddings stay fixed at the model's own table — the quantity being
/// differentiated is "log-prob of this target given these (possibly
/// interpolated) prompt embeddings".
pub trait GradientModel: Send + Sync {
    /// Token ids for a text under the backend's tokenizer.
    fn token_ids(&self, text: &str) -> Result<Vec<usize>, AttrError>;

    fn embedding_dim(&self) -> usize;

    /// Embedding row per token id.
    fn embed(&self, ids: &[usize]) -> Vec<Vec<f64>>;

    /// Per-target-token conditional log-probs given prompt embeddings
    /// (teacher forcing). Value-only path; used by quadrature and by
    /// finite-difference checks.
    fn target_logprobs_at(
        &self,
        prompt_embeddings: &[Vec<f64>],
        target_ids: &[usize],
    ) -> Result<Vec<f64>, AttrError>;

    /// Gradients of each target token's conditional log-prob with respect
    /// to every prompt embedding: result[t][p][k] is
    /// d log p(target_t) / d prompt_embeddings[p][k].
    fn target_logprob_grads(
        &self,
        prompt_embeddings: &[Vec<f64>],
        target_ids: &[usize],
    ) -> Result<Vec<Vec<Vec<f64>>>, AttrError>;
}

/// Scoring/generation interface shared by all backends.
pub trait TextModel: Send + Sync {
    /// Stable identifier recorded in result metadata.
    fn id(&self) -> String;

    fn capabilities(&self) -> Capabilities;

    /// Backend tokenization of arbitrary text.
    fn tokenize(&self, text: &str) -> Result<Vec<String>, AttrError>;

    /// Scores `target` as a continuation of `prompt` under teacher
    /// forcing: token t is conditioned on prompt plus target tokens < t.
    /// An empty target scores as an empty product (total 0.0).
    fn score_target(&self, prompt: &str, target: &str) -> Result<ScoredSequence, AttrError>;

    /// Greedy decode: argmax token per step, ties broken by lowest token
    /// id; stops at a stop token, end-of-sequence, or `max_tokens`.
    fn generate_greedy(
        &self,
        prompt: &str,
        max_tokens: usize,
        stop: Option<&[String]>,
    ) -> Result<Generation, AttrError>;

    /// Next-token probability distribution after `prompt`, as
    /// (token, probability) pairs in token-id order.
    fn next_token_distribution(&self, prompt: &str) -> Result<Vec<(String, f64)>, AttrError>;

    /// Gradient access, for backends that expose it.
    fn gradients(&self) -> Option<&dyn GradientModel> {
        None
    }
}

/// Named statistics over the next-token distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputStat {
    /// Shannon entropy in nats: -sum p ln p.
    Entropy,
    /// Probability of the most likely token.
    MaxProb,
}

impl OutputStat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputStat::Entropy => "entropy",
            OutputStat::MaxProb => "max_prob",
        }
    }

    pub fn parse(name: &str) -> Result<Self, AttrError> {
        match name {
            "entropy" => Ok(OutputStat::Entropy),
            "max_prob" => Ok(OutputStat::MaxProb),
            other => Err(AttrError::InvalidArg(format!(
                "unknown output statistic '{other}' (expected entropy or max_prob)"
            ))),
        }
    }

    pub fn apply(&self, probs: &[f64]) -> f64 {
        match self {
            OutputStat::Entropy => probs
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * p.ln())
                .sum(),
            OutputStat::MaxProb => probs.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Applies `stat` to the next-token distribution after `prompt`.
pub fn output_stat(
    model: &dyn TextModel,
    prompt: &str,
    stat: OutputStat,
) -> Result<f64, AttrError> {
    if !model.capabilities().exposes_logits {
        return Err(AttrError::Capability {
            model: model.id(),
            needed: "output statistics (exposes_logits)".into(),
        });
    }
    let dist = model.next_token_distribution(prompt)?;
    let probs: Vec<f64> = dist.iter().map(|(_, p)| *p).collect();
    Ok(stat.apply(&probs))
}
