//! Feature attribution for generative text models.
//!
//! The engine answers "how much did each part of the prompt contribute to
//! this output?" for any text model it can score. Prompts are decomposed
//! into interpretable features (template slots, optionally grouped), and
//! each feature receives a score per target token.
//!
//! Two families of methods are provided:
//!
//! * perturbation-based ([`perturb`]): feature ablation, exact and sampled
//!   Shapley values, LIME, and Kernel SHAP. These only need a way to score
//!   text, so they work against any backend in [`model`].
//! * gradient-based ([`grad`]): saliency and integrated gradients. These
//!   need gradients with respect to input-token embeddings and run against
//!   the built-in differentiable toy model ([`toylm`]) or any backend that
//!   implements [`model::GradientModel`].
//!
//! [`orchestrate::attribute`] is the main entry point; [`render`] turns
//! results into SVG/HTML heatmaps or terminal tables.
//!
//! Everything is deterministic: one seed fixes every random draw, and the
//! evaluation plumbing guarantees bit-identical results for any worker
//! count.

pub mod error;
pub mod features;
pub mod grad;
pub mod model;
pub mod orchestrate;
pub mod perturb;
pub mod render;
pub mod rng;
pub mod toylm;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::AttrError;
