//! Config document schema and its mapping onto engine types.
//!
//! A run is described by one JSON object with four sections:
//!
//! ```json
//! {
//!   "model":  {"type": "mock|toylm|http|subprocess", ...},
//!   "method": {"name": "ablation", "seed": 0, ...},
//!   "input":  {"template": "...", "values": [...], "baselines": [...],
//!              "mask": [...]},
//!   "target": {"type": "most_likely|string|stat", ...}
//! }
//! ```
//!
//! `values`, `baselines`, and `mask` accept a positional array form or a
//! named object form matching the template's placeholder style. In the
//! named baseline form the key "joint" is reserved for co-sampled slot
//! tuples. Method hyperparameters live flat beside "name"; supplying a
//! parameter the named method does not use is an error, so typos fail
//! loudly instead of being ignored.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;

use lmattr::error::AttrError;
use lmattr::features::{BaselineBuilder, MaskSpec, SlotKey, SlotValues, TemplateInput};
use lmattr::grad::Aggregation;
use lmattr::model::{HttpModel, MockModel, OutputStat, SubprocessModel, TextModel};
use lmattr::orchestrate::{Method, TargetSpec};
use lmattr::perturb::Regularization;
use lmattr::toylm::ToyLM;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelConfig,
    pub method: MethodConfig,
    pub input: InputConfig,
    pub target: TargetConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelConfig {
    Mock {
        vocab: Vec<String>,
        #[serde(default)]
        table: Vec<MockRow>,
        #[serde(default)]
        eos: Option<String>,
    },
    Toylm {
        #[serde(default)]
        seed: u64,
        vocab: Vec<String>,
        #[serde(default = "default_embedding_dim")]
        embedding_dim: usize,
    },
    Http {
        base_url: String,
        model: String,
        #[serde(default)]
        timeout_s: Option<u64>,
    },
    Subprocess {
        command: String,
        #[serde(default)]
        args: Vec<String>,
    },
}

fn default_embedding_dim() -> usize {
    16
}

/// One conditional-table row of the mock backend.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockRow {
    pub context: String,
    /// next token -> probability; sorted iteration keeps construction
    /// deterministic.
    pub next: BTreeMap<String, f64>,
}

impl ModelConfig {
    /// Construct the backend. `timeout_override` (from --timeout-s) wins
    /// over the config's own timeout where one applies.
    pub fn build(&self, timeout_override: Option<u64>) -> Result<Arc<dyn TextModel>, AttrError> {
        match self {
            ModelConfig::Mock { vocab, table, eos } => {
                let rows: Vec<(&str, Vec<(&str, f64)>)> = table
                    .iter()
                    .map(|row| {
                        let next: Vec<(&str, f64)> =
                            row.next.iter().map(|(t, &p)| (t.as_str(), p)).collect();
                        (row.context.as_str(), next)
                    })
                    .collect();
                Ok(Arc::new(MockModel::new("mock", vocab.clone(), rows, eos.as_deref())?))
            }
            ModelConfig::Toylm { seed, vocab, embedding_dim } => {
                Ok(Arc::new(ToyLM::seeded(vocab.clone(), *embedding_dim, *seed)?))
            }
            ModelConfig::Http { base_url, model, timeout_s } => {
                let secs = timeout_override.or(*timeout_s).unwrap_or(120);
                Ok(Arc::new(HttpModel::with_timeout(
                    base_url,
                    model,
                    Duration::from_secs(secs),
                )))
            }
            ModelConfig::Subprocess { command, args } => {
                Ok(Arc::new(SubprocessModel::spawn(command, args)?))
            }
        }
    }
}

pub const METHOD_NAMES: [&str; 7] = [
    "ablation",
    "shapley-exact",
    "shapley-sampling",
    "lime",
    "kernel-shap",
    "saliency",
    "integrated-gradients",
];

/// Flat method section: "name" picks the method, the rest are
/// hyperparameters. Applicability is validated in [`MethodConfig::build`].
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub n_permutations: Option<usize>,
    #[serde(default)]
    pub antithetic: Option<bool>,
    #[serde(default)]
    pub n_samples: Option<usize>,
    #[serde(default)]
    pub kernel_width: Option<f64>,
    #[serde(default)]
    pub ridge: Option<f64>,
    #[serde(default)]
    pub lasso: Option<f64>,
    #[serde(default)]
    pub exhaustive: Option<bool>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub aggregation: Option<String>,
}

impl MethodConfig {
    pub fn build(&self) -> Result<Method, AttrError> {
        self.check_applicability()?;
        let aggregation = match &self.aggregation {
            Some(text) => Aggregation::parse(text)?,
            None => Aggregation::default(),
        };
        match self.name.as_str() {
            "ablation" => Ok(Method::Ablation),
            "shapley-exact" => Ok(Method::ShapleyExact { cap: self.cap }),
            "shapley-sampling" => Ok(Method::ShapleySampling {
                n_permutations: self.n_permutations.unwrap_or(25),
                antithetic: self.antithetic.unwrap_or(false),
            }),
            "lime" => {
                let regularization = match (self.ridge, self.lasso) {
                    (None, None) => Regularization::None,
                    (Some(l), None) => Regularization::Ridge(l),
                    (None, Some(l)) => Regularization::Lasso(l),
                    (Some(_), Some(_)) => {
                        return Err(AttrError::InvalidArg(
                            "lime takes ridge or lasso, not both".into(),
                        ))
                    }
                };
                Ok(Method::Lime {
                    n_samples: self.n_samples,
                    kernel_width: self.kernel_width.unwrap_or(0.75),
                    regularization,
                    exhaustive: self.exhaustive.unwrap_or(false),
                })
            }
            "kernel-shap" => Ok(Method::KernelShap {
                n_samples: self.n_samples,
                exhaustive: self.exhaustive.unwrap_or(false),
            }),
            "saliency" => Ok(Method::Saliency { aggregation }),
            "integrated-gradients" => Ok(Method::IntegratedGradients {
                steps: self.steps.unwrap_or(50),
                aggregation,
            }),
            other => Err(AttrError::InvalidArg(format!(
                "unknown method '{other}'; valid methods: {}",
                METHOD_NAMES.join(", ")
            ))),
        }
    }

    /// Rejects hyperparameters the named method does not consume.
    fn check_applicability(&self) -> Result<(), AttrError> {
        let allowed: &[&str] = match self.name.as_str() {
            "ablation" => &[],
            "shapley-exact" => &["cap"],
            "shapley-sampling" => &["n_permutations", "antithetic"],
            "lime" => &["n_samples", "kernel_width", "ridge", "lasso", "exhaustive"],
            "kernel-shap" => &["n_samples", "exhaustive"],
            "saliency" => &["aggregation"],
            "integrated-gradients" => &["steps", "aggregation"],
            _ => return Ok(()), // unknown name reported by build
        };
        let supplied = [
            ("cap", self.cap.is_some()),
            ("n_permutations", self.n_permutations.is_some()),
            ("antithetic", self.antithetic.is_some()),
            ("n_samples", self.n_samples.is_some()),
            ("kernel_width", self.kernel_width.is_some()),
            ("ridge", self.ridge.is_some()),
            ("lasso", self.lasso.is_some()),
            ("exhaustive", self.exhaustive.is_some()),
            ("steps", self.steps.is_some()),
            ("aggregation", self.aggregation.is_some()),
        ];
        for (field, present) in supplied {
            if present && !allowed.contains(&field) {
                return Err(AttrError::InvalidArg(format!(
                    "'{field}' does not apply to method '{}'",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    pub template: String,
    pub values: ValuesConfig,
    pub baselines: BaselinesConfig,
    #[serde(default)]
    pub mask: Option<MaskConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ValuesConfig {
    List(Vec<String>),
    Map(BTreeMap<String, String>),
}

/// A slot's baseline: one fixed replacement or a uniform choice list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SlotBaseline {
    Fixed(String),
    Choices(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum BaselinesConfig {
    /// Positional: one entry per slot.
    List(Vec<SlotBaseline>),
    /// Named object; the key "joint" holds co-sampled tuples.
    Map(NamedBaselines),
}

#[derive(Debug, Deserialize)]
pub struct NamedBaselines {
    #[serde(default)]
    pub joint: Vec<JointBaseline>,
    #[serde(flatten)]
    pub slots: BTreeMap<String, SlotBaseline>,
}

/// Slots whose baseline values are always drawn together as one tuple.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointBaseline {
    pub slots: Vec<String>,
    pub choices: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum MaskConfig {
    PerSlot(Vec<u64>),
    Pairs(BTreeMap<String, u64>),
}

/// Slot keys in object forms: a decimal key addresses a positional slot,
/// anything else a named one.
fn slot_key(text: &str) -> SlotKey {
    match text.parse::<usize>() {
        Ok(index) => SlotKey::from(index),
        Err(_) => SlotKey::from(text),
    }
}

impl InputConfig {
    pub fn build(&self) -> Result<TemplateInput, AttrError> {
        let values = match &self.values {
            ValuesConfig::List(list) => SlotValues::positional(list.clone()),
            ValuesConfig::Map(map) => {
                SlotValues::named(map.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
            }
        };
        let mut baselines = BaselineBuilder::new();
        match &self.baselines {
            BaselinesConfig::List(entries) => {
                for (i, entry) in entries.iter().enumerate() {
                    baselines = match entry {
                        SlotBaseline::Fixed(v) => baselines.fixed(i, v.clone()),
                        SlotBaseline::Choices(options) => baselines.choices(i, options.clone()),
                    };
                }
            }
            BaselinesConfig::Map(named) => {
                for (key, entry) in &named.slots {
                    let key = slot_key(key);
                    baselines = match entry {
                        SlotBaseline::Fixed(v) => baselines.fixed(key, v.clone()),
                        SlotBaseline::Choices(options) => baselines.choices(key, options.clone()),
                    };
                }
                for joint in &named.joint {
                    let keys = joint.slots.iter().map(|s| slot_key(s)).collect();
                    baselines = baselines.joint(keys, joint.choices.clone());
                }
            }
        }
        let mask = self.mask.as_ref().map(|m| match m {
            MaskConfig::PerSlot(labels) => MaskSpec::PerSlot(labels.clone()),
            MaskConfig::Pairs(pairs) => {
                MaskSpec::Pairs(pairs.iter().map(|(k, &g)| (slot_key(k), g)).collect())
            }
        });
        TemplateInput::new(&self.template, values, baselines, mask)
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TargetConfig {
    MostLikely {
        #[serde(default = "default_max_tokens")]
        max_tokens: usize,
        #[serde(default)]
        stop: Option<Vec<String>>,
    },
    #[serde(rename = "string")]
    FixedString { text: String },
    Stat { stat: String },
}

fn default_max_tokens() -> usize {
    20
}

impl TargetConfig {
    pub fn build(&self) -> Result<TargetSpec, AttrError> {
        match self {
            TargetConfig::MostLikely { max_tokens, stop } => {
                Ok(TargetSpec::MostLikely { max_tokens: *max_tokens, stop: stop.clone() })
            }
            TargetConfig::FixedString { text } => {
                Ok(TargetSpec::FixedString { text: text.clone() })
            }
            TargetConfig::Stat { stat } => {
                Ok(TargetSpec::OutputStat { stat: OutputStat::parse(stat)? })
            }
        }
    }
}

/// Parse a config document, reporting schema violations with a path into
/// the document.
pub fn parse_config(text: &str) -> Result<Config, AttrError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de)
        .map_err(|e| AttrError::InvalidArg(format!("config at {}: {}", e.path(), e.inner())))
}
