//! Error type shared across the engine.

/// All failure modes of the attribution engine.
///
/// Variants split into two broad classes used by callers to pick exit
/// codes: configuration/validation problems (bad templates, arities,
/// hyperparameters, capability mismatches) and runtime backend problems
/// (transport, tokenization, evaluation failures). `is_config_error`
/// encodes the split.
#[derive(Debug, thiserror::Error)]
pub enum AttrError {
    #[error("template: {0}")]
    Template(String),

    #[error("baseline configuration: {0}")]
    Baseline(String),

    #[error("mask: {0}")]
    Mask(String),

    #[error("arity: {0}")]
    Arity(String),

    #[error("model '{model}' does not support {needed}")]
    Capability { model: String, needed: String },

    #[error("tokenization: {0}")]
    Tokenize(String),

    #[error("vocabulary: {0}")]
    Vocabulary(String),

    #[error("transport: {0}")]
    Transport(String),

    #[error("backend: {0}")]
    Backend(String),

    #[error("generation: {0}")]
    Generation(String),

    #[error("evaluation of include set {include_set} failed: {source}")]
    Evaluation {
        include_set: String,
        #[source]
        source: Box<AttrError>,
    },

    #[error(
        "{method} needs {needed} evaluations for {groups} groups, over the cap of {cap}; \
         use shapley-sampling instead"
    )]
    TooLarge {
        method: String,
        groups: usize,
        needed: u128,
        cap: u128,
    },

    #[error("rank-deficient regression (dependent columns: {columns:?}); try more samples")]
    RankDeficient { columns: Vec<String> },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("render: {0}")]
    Render(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl AttrError {
    /// True when the error stems from user-supplied configuration rather
    /// than a backend/runtime failure. Drives the CLI exit-code split.
    pub fn is_config_error(&self) -> bool {
        match self {
            AttrError::Template(_)
            | AttrError::Baseline(_)
            | AttrError::Mask(_)
            | AttrError::Arity(_)
            | AttrError::Capability { .. }
            | AttrError::TooLarge { .. }
            | AttrError::RankDeficient { .. }
            | AttrError::Shape(_)
            | AttrError::InvalidArg(_) => true,
            AttrError::Evaluation { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
