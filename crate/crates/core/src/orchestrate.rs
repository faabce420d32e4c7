//! End-to-end attribution runs.
//!
//! `attribute` binds a model, a [`TemplateInput`], a method, and a target
//! into one run: it resolves the target once on the original prompt,
//! builds the set function (perturbation methods) or delegates to the
//! gradient module, and assembles an [`AttributionResult`] with per-target-
//! token rows, per-group totals, and run metadata.
//!
//! Determinism contract: (input, method, target, seed) fixes every number
//! in the result. Worker count only changes scheduling; baseline draws are
//! salted by pre-assigned evaluation indices and sample sets are drawn
//! up front from dedicated streams.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::AttrError;
use crate::features::{IncludeSet, TemplateInput};
use crate::grad::{self, Aggregation};
use crate::model::{output_stat, CachedModel, OutputStat, TextModel};
use crate::perturb::{self, Regularization, Sampling, SetFunction};
use crate::rng;

/// What quantity the attribution explains.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// Greedy-decode a target from the original prompt, then hold that
    /// text fixed across all perturbed evaluations.
    MostLikely { max_tokens: usize, stop: Option<Vec<String>> },
    /// User-supplied target text, scored under teacher forcing.
    FixedString { text: String },
    /// A scalar statistic of the next-token distribution; yields a single
    /// pseudo-token row named after the statistic.
    OutputStat { stat: OutputStat },
}

/// Attribution method plus hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Ablation,
    ShapleyExact {
        /// Group-count cap; default [`perturb::DEFAULT_SHAPLEY_EXACT_CAP`].
        cap: Option<usize>,
    },
    ShapleySampling {
        n_permutations: usize,
        antithetic: bool,
    },
    Lime {
        /// Default: 2^G for G <= 10, else 4G + 2G^2.
        n_samples: Option<usize>,
        kernel_width: f64,
        regularization: Regularization,
        exhaustive: bool,
    },
    KernelShap {
        n_samples: Option<usize>,
        exhaustive: bool,
    },
    Saliency {
        aggregation: Aggregation,
    },
    IntegratedGradients {
        steps: usize,
        aggregation: Aggregation,
    },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Ablation => "ablation",
            Method::ShapleyExact { .. } => "shapley-exact",
            Method::ShapleySampling { .. } => "shapley-sampling",
            Method::Lime { .. } => "lime",
            Method::KernelShap { .. } => "kernel-shap",
            Method::Saliency { .. } => "saliency",
            Method::IntegratedGradients { .. } => "integrated-gradients",
        }
    }

    fn is_gradient(&self) -> bool {
        matches!(self, Method::Saliency { .. } | Method::IntegratedGradients { .. })
    }
}

/// Default sample count for the surrogate methods.
pub fn default_surrogate_samples(groups: usize) -> usize {
    if groups <= 10 {
        1 << groups
    } else {
        4 * groups + 2 * groups * groups
    }
}

/// Run-level knobs independent of the method.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    /// Worker threads for evaluation; None uses the ambient pool.
    pub workers: Option<usize>,
    /// Memoize model calls within the run (on by default).
    pub cache: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, workers: None, cache: true }
    }
}

/// Run metadata recorded alongside the scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub method: String,
    pub seed: u64,
    pub model: String,
    pub evaluations: u64,
    /// Wall-clock milliseconds. Zeroed in serialized documents so that
    /// written results are byte-identical across runs; the in-memory value
    /// is real.
    pub wall_ms: u64,
}

/// Final attribution output: one row per target token (or statistic), one
/// column per feature group, totals as column sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    pub version: u32,
    pub features: Vec<String>,
    pub target_tokens: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub totals: Vec<f64>,
    pub meta: RunMeta,
}

/// Schema version written and accepted by this build.
pub const RESULT_VERSION: u32 = 1;

impl AttributionResult {
    /// Serialize to the result document: version-tagged pretty JSON with
    /// wall_ms zeroed for byte-stable output, trailing newline included.
    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.meta.wall_ms = 0;
        let mut text = serde_json::to_string_pretty(&doc).expect("result serializes");
        text.push('\n');
        text
    }

    /// Parse a result document, checking the schema version and shape.
    pub fn from_json(text: &str) -> Result<Self, AttrError> {
        let doc: AttributionResult = serde_json::from_str(text)
            .map_err(|e| AttrError::InvalidArg(format!("result document: {e}")))?;
        if doc.version != RESULT_VERSION {
            return Err(AttrError::InvalidArg(format!(
                "unsupported result version {} (expected {RESULT_VERSION})",
                doc.version
            )));
        }
        if doc.matrix.len() != doc.target_tokens.len()
            || doc.matrix.iter().any(|row| row.len() != doc.features.len())
            || doc.totals.len() != doc.features.len()
        {
            return Err(AttrError::Shape("result matrix does not match its labels".into()));
        }
        Ok(doc)
    }
}

/// A target pinned down for the whole run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedTarget {
    /// Fixed target text for scoring; None for output statistics.
    pub text: Option<String>,
    /// Row labels of the result matrix.
    pub token_labels: Vec<String>,
    /// The statistic to evaluate instead of target scoring, if any.
    pub stat: Option<OutputStat>,
}

/// Resolve the target once, on the fully-formatted original prompt. The
/// resolved text is frozen: perturbed evaluations vary only the prompt.
pub fn resolve_target(
    model: &dyn TextModel,
    input: &TemplateInput,
    spec: &TargetSpec,
) -> Result<ResolvedTarget, AttrError> {
    match spec {
        TargetSpec::MostLikely { max_tokens, stop } => {
            if *max_tokens == 0 {
                return Err(AttrError::InvalidArg("most_likely target needs max_tokens >= 1".into()));
            }
            if !model.capabilities().generates {
                return Err(AttrError::Capability {
                    model: model.id(),
                    needed: "generation".into(),
                });
            }
            let generation = model.generate_greedy(&input.prompt(), *max_tokens, stop.as_deref())?;
            if generation.seq.tokens.is_empty() {
                return Err(AttrError::Generation(
                    "greedy decode produced no tokens to attribute".into(),
                ));
            }
            Ok(ResolvedTarget {
                text: Some(generation.text),
                token_labels: generation.seq.tokens,
                stat: None,
            })
        }
        TargetSpec::FixedString { text } => {
            if text.is_empty() {
                return Err(AttrError::InvalidArg("fixed-string target must be non-empty".into()));
            }
            let token_labels = model.tokenize(text)?;
            Ok(ResolvedTarget { text: Some(text.clone()), token_labels, stat: None })
        }
        TargetSpec::OutputStat { stat } => {
            if !model.capabilities().exposes_logits {
                return Err(AttrError::Capability {
                    model: model.id(),
                    needed: "output distributions".into(),
                });
            }
            Ok(ResolvedTarget {
                text: None,
                token_labels: vec![stat.name().to_string()],
                stat: Some(*stat),
            })
        }
    }
}

/// Upper bound on model evaluations for a method at G feature groups.
pub fn evaluation_budget(method: &Method, groups: usize) -> u128 {
    let surrogate = |n_samples: &Option<usize>, exhaustive: bool| -> u128 {
        let n = if exhaustive {
            1u128 << groups
        } else {
            n_samples.unwrap_or_else(|| default_surrogate_samples(groups)) as u128
        };
        n + 2
    };
    match method {
        Method::Ablation => groups as u128 + 1,
        Method::ShapleyExact { .. } => 1u128 << groups,
        Method::ShapleySampling { n_permutations, .. } => {
            *n_permutations as u128 * groups as u128 + 1
        }
        Method::Lime { n_samples, exhaustive, .. } => surrogate(n_samples, *exhaustive),
        Method::KernelShap { n_samples, exhaustive } => surrogate(n_samples, *exhaustive),
        Method::Saliency { .. } => 1,
        Method::IntegratedGradients { steps, .. } => *steps as u128 + 1,
    }
}

/// Run one attribution end to end. See the module docs for the contract.
pub fn attribute(
    model: Arc<dyn TextModel>,
    input: &TemplateInput,
    method: &Method,
    target: &TargetSpec,
    options: &RunOptions,
) -> Result<AttributionResult, AttrError> {
    let started = Instant::now();

    if method.is_gradient() {
        if matches!(target, TargetSpec::OutputStat { .. }) {
            return Err(AttrError::InvalidArg(
                "gradient methods attribute target log-probs, not output statistics".into(),
            ));
        }
        if !model.capabilities().exposes_gradients {
            return Err(AttrError::Capability { model: model.id(), needed: "gradients".into() });
        }
    } else if !model.capabilities().scores_targets
        && !matches!(target, TargetSpec::OutputStat { .. })
    {
        return Err(AttrError::Capability { model: model.id(), needed: "target scoring".into() });
    }

    let model_id = model.id();
    let cached = CachedModel::with_enabled(model, options.cache);

    let run = || -> Result<AttributionResult, AttrError> {
        let resolved = resolve_target(&cached, input, target)?;
        let (features, target_tokens, matrix, totals, evaluations) = if method.is_gradient() {
            run_gradient(&cached, input, method, &resolved)?
        } else {
            run_perturbation(&cached, input, method, &resolved, options.seed)?
        };
        Ok(AttributionResult {
            version: RESULT_VERSION,
            features,
            target_tokens,
            matrix,
            totals,
            meta: RunMeta {
                method: method.name().to_string(),
                seed: options.seed,
                model: model_id.clone(),
                evaluations,
                wall_ms: 0,
            },
        })
    };

    let mut result = match options.workers {
        Some(workers) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| AttrError::InvalidArg(format!("worker pool: {e}")))?;
            pool.install(run)
        }
        None => run(),
    }?;
    result.meta.wall_ms = started.elapsed().as_millis() as u64;
    Ok(result)
}

type RunParts = (Vec<String>, Vec<String>, Vec<Vec<f64>>, Vec<f64>, u64);

fn run_perturbation(
    cached: &CachedModel,
    input: &TemplateInput,
    method: &Method,
    resolved: &ResolvedTarget,
    seed: u64,
) -> Result<RunParts, AttrError> {
    let groups = input.group_count();
    let outputs = resolved.token_labels.len();

    let evaluator = |s: &IncludeSet, eval_index: u64| -> Result<Vec<f64>, AttrError> {
        let mut rng = rng::baseline_stream(seed, eval_index);
        let draw = input.sample_baseline(&mut rng);
        let prompt = input.perturbed_prompt(s, &draw)?;
        match (resolved.stat, resolved.text.as_deref()) {
            (Some(stat), _) => Ok(vec![output_stat(cached, &prompt, stat)?]),
            (None, Some(text)) => Ok(cached.score_target(&prompt, text)?.token_logprobs),
            (None, None) => unreachable!("resolved target has neither text nor statistic"),
        }
    };
    let f = SetFunction::new(groups, outputs, evaluator);

    let scores = match method {
        Method::Ablation => perturb::feature_ablation(&f)?,
        Method::ShapleyExact { cap } => {
            perturb::shapley_exact_with_cap(&f, cap.unwrap_or(perturb::DEFAULT_SHAPLEY_EXACT_CAP))?
        }
        Method::ShapleySampling { n_permutations, antithetic } => {
            perturb::shapley_sampling_with(&f, *n_permutations, seed, *antithetic)?
        }
        Method::Lime { n_samples, kernel_width, regularization, exhaustive } => {
            let sampling = if *exhaustive {
                Sampling::Exhaustive
            } else {
                Sampling::MonteCarlo(n_samples.unwrap_or_else(|| default_surrogate_samples(groups)))
            };
            perturb::lime(&f, sampling, *kernel_width, *regularization, seed)?
        }
        Method::KernelShap { n_samples, exhaustive } => {
            let sampling = if *exhaustive {
                Sampling::Exhaustive
            } else {
                Sampling::MonteCarlo(n_samples.unwrap_or_else(|| default_surrogate_samples(groups)))
            };
            perturb::kernel_shap(&f, sampling, seed)?
        }
        gradient => unreachable!("gradient method {} in perturbation path", gradient.name()),
    };

    Ok((
        input.group_labels(),
        resolved.token_labels.clone(),
        scores.matrix,
        scores.totals,
        scores.evaluations,
    ))
}

fn run_gradient(
    cached: &CachedModel,
    input: &TemplateInput,
    method: &Method,
    resolved: &ResolvedTarget,
) -> Result<RunParts, AttrError> {
    let text = resolved.text.as_deref().expect("statistic targets rejected for gradient methods");
    let prompt = input.prompt();
    let rows = match method {
        Method::Saliency { aggregation } => grad::saliency_rows(cached, &prompt, text, *aggregation)?,
        Method::IntegratedGradients { steps, aggregation } => {
            grad::integrated_gradients_rows(cached, &prompt, text, None, *steps, *aggregation)?
        }
        other => unreachable!("perturbation method {} in gradient path", other.name()),
    };
    let matrix: Vec<Vec<f64>> = rows.rows.iter().map(|r| r.per_token.clone()).collect();
    let totals: Vec<f64> = (0..rows.prompt_tokens.len())
        .map(|p| matrix.iter().map(|row| row[p]).sum())
        .collect();
    Ok((rows.prompt_tokens, rows.target_tokens, matrix, totals, rows.evaluations))
}
