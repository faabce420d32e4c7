//! Gradient-based attribution: Saliency and Integrated Gradients.
//!
//! Both methods work on models exposing gradients of target log-probs with
//! respect to prompt-token embeddings. Saliency reads the raw gradient at
//! the input point; Integrated Gradients averages gradients along the
//! straight-line path from a baseline embedding to the input (trapezoid
//! rule on a uniform grid) and scales by the input-baseline difference.
//!
//! Per-embedding-dimension scores are collapsed to per-token scores by a
//! selectable aggregation; sum is the default because it preserves the
//! path-integral completeness property across tokens.

use rayon::prelude::*;

use crate::error::AttrError;
use crate::model::{GradientModel, TextModel};

/// How per-dimension scores collapse into one score per token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregation {
    #[default]
    Sum,
    L2,
}

impl Aggregation {
    pub fn name(&self) -> &'static str {
        match self {
            Aggregation::Sum => "sum",
            Aggregation::L2 => "l2",
        }
    }

    pub fn parse(text: &str) -> Result<Self, AttrError> {
        match text {
            "sum" => Ok(Aggregation::Sum),
            "l2" => Ok(Aggregation::L2),
            other => Err(AttrError::InvalidArg(format!(
                "unknown aggregation '{other}' (expected 'sum' or 'l2')"
            ))),
        }
    }
}

/// Collapse a token × dimension matrix to one value per token.
pub fn aggregate(per_dim: &[Vec<f64>], mode: Aggregation) -> Vec<f64> {
    per_dim
        .iter()
        .map(|row| match mode {
            Aggregation::Sum => row.iter().sum(),
            Aggregation::L2 => row.iter().map(|v| v * v).sum::<f64>().sqrt(),
        })
        .collect()
}

/// Attribution over prompt-token embeddings for one scalar output.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingAttribution {
    /// Prompt token × embedding dimension scores.
    pub per_dim: Vec<Vec<f64>>,
    /// Per-token scores after aggregation.
    pub per_token: Vec<f64>,
    pub aggregation: Aggregation,
}

impl EmbeddingAttribution {
    fn new(per_dim: Vec<Vec<f64>>, aggregation: Aggregation) -> Self {
        let per_token = aggregate(&per_dim, aggregation);
        EmbeddingAttribution { per_dim, per_token, aggregation }
    }
}

/// Per-target-token attribution rows plus labels and cost bookkeeping.
/// `rows[t]` attributes target token t's conditional log-prob; summing the
/// rows' `per_dim` matrices gives the attribution of the total log-prob.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientRows {
    pub prompt_tokens: Vec<String>,
    pub target_tokens: Vec<String>,
    pub rows: Vec<EmbeddingAttribution>,
    /// Number of gradient evaluations spent.
    pub evaluations: u64,
}

impl GradientRows {
    /// Per-dimension attribution of the summed target log-prob.
    pub fn summed_per_dim(&self) -> Vec<Vec<f64>> {
        let prompts = self.prompt_tokens.len();
        let dim = self.rows.first().and_then(|r| r.per_dim.first()).map_or(0, Vec::len);
        let mut out = vec![vec![0.0; dim]; prompts];
        for row in &self.rows {
            for (acc, src) in out.iter_mut().zip(&row.per_dim) {
                for (a, s) in acc.iter_mut().zip(src) {
                    *a += s;
                }
            }
        }
        out
    }

    fn collapse(&self, aggregation: Aggregation) -> EmbeddingAttribution {
        EmbeddingAttribution::new(self.summed_per_dim(), aggregation)
    }
}

struct Resolved<'m> {
    gm: &'m dyn GradientModel,
    prompt_tokens: Vec<String>,
    target_tokens: Vec<String>,
    prompt_ids: Vec<usize>,
    target_ids: Vec<usize>,
    input: Vec<Vec<f64>>,
}

fn resolve<'m>(model: &'m dyn TextModel, prompt: &str, target: &str) -> Result<Resolved<'m>, AttrError> {
    let gm = model.gradients().ok_or_else(|| AttrError::Capability {
        model: model.id(),
        needed: "gradients".into(),
    })?;
    let prompt_tokens = model.tokenize(prompt)?;
    let target_tokens = model.tokenize(target)?;
    let prompt_ids = gm.token_ids(prompt)?;
    let target_ids = gm.token_ids(target)?;
    if prompt_ids.is_empty() {
        return Err(AttrError::InvalidArg("gradient attribution needs a non-empty prompt".into()));
    }
    if target_ids.is_empty() {
        return Err(AttrError::InvalidArg("gradient attribution needs a non-empty target".into()));
    }
    let input = gm.embed(&prompt_ids);
    Ok(Resolved { gm, prompt_tokens, target_tokens, prompt_ids, target_ids, input })
}

/// Saliency per target token: the raw gradient of each target token's
/// conditional log-prob with respect to every prompt embedding. One
/// gradient evaluation total.
pub fn saliency_rows(
    model: &dyn TextModel,
    prompt: &str,
    target: &str,
    aggregation: Aggregation,
) -> Result<GradientRows, AttrError> {
    let r = resolve(model, prompt, target)?;
    let grads = r.gm.target_logprob_grads(&r.input, &r.target_ids)?;
    let rows = grads.into_iter().map(|g| EmbeddingAttribution::new(g, aggregation)).collect();
    Ok(GradientRows {
        prompt_tokens: r.prompt_tokens,
        target_tokens: r.target_tokens,
        rows,
        evaluations: 1,
    })
}

/// Saliency of the total target log-prob (sum over target tokens).
pub fn saliency(
    model: &dyn TextModel,
    prompt: &str,
    target: &str,
    aggregation: Aggregation,
) -> Result<EmbeddingAttribution, AttrError> {
    saliency_rows(model, prompt, target, aggregation).map(|rows| rows.collapse(aggregation))
}

/// Integrated Gradients per target token along the straight-line embedding
/// path from `baseline` (all zeros when omitted) to the input. `steps` is
/// the number of path intervals; the α grid has steps + 1 points including
/// both endpoints, combined by the trapezoid rule, so the cost is
/// steps + 1 gradient evaluations.
pub fn integrated_gradients_rows(
    model: &dyn TextModel,
    prompt: &str,
    target: &str,
    baseline: Option<&[Vec<f64>]>,
    steps: usize,
    aggregation: Aggregation,
) -> Result<GradientRows, AttrError> {
    if steps == 0 {
        return Err(AttrError::InvalidArg("integrated gradients needs steps >= 1".into()));
    }
    let r = resolve(model, prompt, target)?;
    let dim = r.gm.embedding_dim();
    let zeros;
    let base: &[Vec<f64>] = match baseline {
        Some(b) => {
            if b.len() != r.input.len() || b.iter().any(|row| row.len() != dim) {
                return Err(AttrError::Shape(format!(
                    "baseline must be {} embeddings of dimension {dim}",
                    r.input.len()
                )));
            }
            b
        }
        None => {
            zeros = vec![vec![0.0; dim]; r.input.len()];
            &zeros
        }
    };

    // Gradients at each grid point, evaluated independently; the reduction
    // below walks steps in index order so worker count cannot matter.
    let grids: Vec<Result<Vec<Vec<Vec<f64>>>, AttrError>> = (0..=steps)
        .into_par_iter()
        .map(|s| {
            let alpha = s as f64 / steps as f64;
            let point: Vec<Vec<f64>> = r
                .input
                .iter()
                .zip(base)
                .map(|(x, b)| x.iter().zip(b).map(|(xv, bv)| bv + alpha * (xv - bv)).collect())
                .collect();
            r.gm.target_logprob_grads(&point, &r.target_ids)
        })
        .collect();

    let targets = r.target_ids.len();
    let prompts = r.prompt_ids.len();
    let mut avg = vec![vec![vec![0.0; dim]; prompts]; targets];
    for (s, grid) in grids.into_iter().enumerate() {
        let grad = grid?;
        // Trapezoid weights: endpoints count half.
        let w = if s == 0 || s == steps { 0.5 } else { 1.0 } / steps as f64;
        for (acc_t, g_t) in avg.iter_mut().zip(&grad) {
            for (acc_p, g_p) in acc_t.iter_mut().zip(g_t) {
                for (a, g) in acc_p.iter_mut().zip(g_p) {
                    *a += w * g;
                }
            }
        }
    }

    let rows = avg
        .into_iter()
        .map(|avg_t| {
            let per_dim: Vec<Vec<f64>> = avg_t
                .into_iter()
                .zip(r.input.iter().zip(base))
                .map(|(row, (x, b))| {
                    row.into_iter()
                        .zip(x.iter().zip(b))
                        .map(|(a, (xv, bv))| (xv - bv) * a)
                        .collect()
                })
                .collect();
            EmbeddingAttribution::new(per_dim, aggregation)
        })
        .collect();

    Ok(GradientRows {
        prompt_tokens: r.prompt_tokens,
        target_tokens: r.target_tokens,
        rows,
        evaluations: steps as u64 + 1,
    })
}

/// Integrated Gradients of the total target log-prob.
pub fn integrated_gradients(
    model: &dyn TextModel,
    prompt: &str,
    target: &str,
    baseline: Option<&[Vec<f64>]>,
    steps: usize,
    aggregation: Aggregation,
) -> Result<EmbeddingAttribution, AttrError> {
    integrated_gradients_rows(model, prompt, target, baseline, steps, aggregation)
        .map(|rows| rows.collapse(aggregation))
}
