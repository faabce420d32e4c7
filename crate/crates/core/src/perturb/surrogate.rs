//! Surrogate-regression attribution: LIME and Kernel SHAP.
//!
//! Both methods sample include-vectors, evaluate the set function on each,
//! and fit a weighted linear model whose coefficients become the scores.
//! They differ in the weighting and in two equality constraints:
//!
//! * LIME weights samples by an exponential kernel on the number of present
//!   groups and runs a plain (optionally regularized) weighted regression.
//! * Kernel SHAP weights coalitions by the Shapley kernel and constrains
//!   the surrogate to agree with the model at the full and empty sets,
//!   which makes exhaustive mode reproduce exact Shapley values.

use rand::Rng;

use super::wls::{solve_weighted_lasso, solve_weighted_ls, Constraint, RankPolicy};
use super::{evaluate_points, AttributionScores, SetFunction};
use crate::error::AttrError;
use crate::features::IncludeSet;
use crate::rng;

/// Exhaustive enumeration is refused beyond this many groups.
const MAX_EXHAUSTIVE_GROUPS: usize = 20;

/// How surrogate methods pick include-vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Draw this many random include-vectors.
    MonteCarlo(usize),
    /// Enumerate every mask (LIME: all 2^G; Kernel SHAP: all proper
    /// non-empty coalitions, with full and empty pinned by constraints).
    Exhaustive,
}

/// Penalty added to the LIME regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    None,
    Ridge(f64),
    Lasso(f64),
}

/// LIME similarity weight for a mask with `present` of `groups` groups:
/// exp(-(1 - present/G)^2 / kernel_width^2). The full mask always weighs 1.
pub fn lime_kernel_weight(present: usize, groups: usize, kernel_width: f64) -> f64 {
    let distance = 1.0 - present as f64 / groups as f64;
    (-(distance * distance) / (kernel_width * kernel_width)).exp()
}

/// Shapley kernel weight of a coalition of `size` out of `groups`:
/// (G-1) / (C(G,size) * size * (G-size)). Defined for 0 < size < G.
pub fn shapley_kernel_weight(groups: usize, size: usize) -> f64 {
    assert!(size > 0 && size < groups, "coalition size out of range");
    let g = groups as f64;
    let mut binom = 1.0;
    for i in 0..size.min(groups - size) {
        binom = binom * (groups - i) as f64 / (i + 1) as f64;
    }
    (g - 1.0) / (binom * size as f64 * (groups - size) as f64)
}

fn mask_rows(masks: &[IncludeSet], groups: usize) -> Vec<Vec<f64>> {
    masks
        .iter()
        .map(|m| (0..groups).map(|g| if m.contains(g) { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn exhaustive_cap(method: &str, groups: usize) -> Result<(), AttrError> {
    if groups > MAX_EXHAUSTIVE_GROUPS {
        return Err(AttrError::TooLarge {
            method: method.into(),
            groups,
            needed: 1u128 << groups,
            cap: 1u128 << MAX_EXHAUSTIVE_GROUPS,
        });
    }
    Ok(())
}

/// LIME: fit a locally weighted linear surrogate to sampled include-vectors
/// and return its coefficients. See [`lime_detailed`] for the intercepts.
pub fn lime(
    f: &SetFunction,
    sampling: Sampling,
    kernel_width: f64,
    regularization: Regularization,
    seed: u64,
) -> Result<AttributionScores, AttrError> {
    lime_detailed(f, sampling, kernel_width, regularization, seed).map(|(scores, _)| scores)
}

/// LIME with the per-output intercepts exposed alongside the scores.
pub fn lime_detailed(
    f: &SetFunction,
    sampling: Sampling,
    kernel_width: f64,
    regularization: Regularization,
    seed: u64,
) -> Result<(AttributionScores, Vec<f64>), AttrError> {
    let g = f.groups();
    if g == 0 {
        return Err(AttrError::InvalidArg("lime needs at least one group".into()));
    }
    if !kernel_width.is_finite() || kernel_width <= 0.0 {
        return Err(AttrError::InvalidArg("kernel_width must be finite and > 0".into()));
    }
    match regularization {
        Regularization::Ridge(l) if !l.is_finite() || l < 0.0 => {
            return Err(AttrError::InvalidArg("ridge penalty must be finite and >= 0".into()));
        }
        Regularization::Lasso(l) if !l.is_finite() || l <= 0.0 => {
            return Err(AttrError::InvalidArg("lasso penalty must be finite and > 0".into()));
        }
        _ => {}
    }

    // Masks are drawn up front from one stream, so evaluation scheduling
    // cannot disturb the sample set.
    let masks: Vec<IncludeSet> = match sampling {
        Sampling::Exhaustive => {
            exhaustive_cap("lime", g)?;
            (0..1u64 << g).map(|m| IncludeSet::from_bitmask(m, g)).collect()
        }
        Sampling::MonteCarlo(n) => {
            if n < g + 2 {
                return Err(AttrError::InvalidArg(format!(
                    "lime needs n_samples >= G + 2 = {}, got {n}",
                    g + 2
                )));
            }
            let mut rng = rng::stream(seed, 0);
            (0..n)
                .map(|_| {
                    IncludeSet::from_groups((0..g).filter(|_| rng.random_bool(0.5)))
                })
                .collect()
        }
    };

    let points: Vec<(IncludeSet, u64)> =
        masks.iter().cloned().zip(0u64..).collect();
    let values = evaluate_points(f, &points)?;

    let design = mask_rows(&masks, g);
    let weights: Vec<f64> =
        masks.iter().map(|m| lime_kernel_weight(m.len(), g, kernel_width)).collect();

    let mut matrix = Vec::with_capacity(f.outputs());
    let mut intercepts = Vec::with_capacity(f.outputs());
    for t in 0..f.outputs() {
        let response: Vec<f64> = values.iter().map(|v| v[t]).collect();
        let solution = match regularization {
            Regularization::None => {
                solve_weighted_ls(&design, &response, &weights, &[], None, RankPolicy::Fail)?
            }
            Regularization::Ridge(l) => {
                solve_weighted_ls(&design, &response, &weights, &[], Some(l), RankPolicy::Fail)?
            }
            Regularization::Lasso(l) => solve_weighted_lasso(&design, &response, &weights, l)?,
        };
        matrix.push(solution.coefficients);
        intercepts.push(solution.intercept);
    }

    let scores = AttributionScores::from_matrix(
        matrix,
        "lime",
        Some(seed),
        masks.len() as u64,
        Some(masks.len() as u64),
    );
    Ok((scores, intercepts))
}

/// Kernel SHAP: regression-based Shapley estimation. Coalitions are drawn
/// with probability proportional to their Shapley kernel weight (sizes
/// weighted by (G-1)/(k (G-k)), then a uniform coalition of that size), and
/// the weighted regression is constrained to hit f(empty) at the empty mask
/// and f(full) at the full mask. Exhaustive mode enumerates every proper
/// non-empty coalition with its analytic kernel weight and reproduces exact
/// Shapley values.
pub fn kernel_shap(
    f: &SetFunction,
    sampling: Sampling,
    seed: u64,
) -> Result<AttributionScores, AttrError> {
    let g = f.groups();
    if g == 0 {
        return Err(AttrError::InvalidArg("kernel-shap needs at least one group".into()));
    }
    if let Sampling::MonteCarlo(n) = sampling {
        if n < g + 2 {
            return Err(AttrError::InvalidArg(format!(
                "kernel-shap needs n_samples >= G + 2 = {}, got {n}",
                g + 2
            )));
        }
    }

    // Interior coalitions (sizes 1..G-1) and their regression weights.
    let (masks, weights): (Vec<IncludeSet>, Vec<f64>) = match sampling {
        Sampling::Exhaustive => {
            exhaustive_cap("kernel-shap", g)?;
            let mut masks = Vec::new();
            let mut weights = Vec::new();
            for m in 1..(1u64 << g) - 1 {
                masks.push(IncludeSet::from_bitmask(m, g));
                weights.push(shapley_kernel_weight(g, m.count_ones() as usize));
            }
            (masks, weights)
        }
        Sampling::MonteCarlo(n) if g > 1 => {
            // Size pmf proportional to C(G,k) * kernel(k) = (G-1)/(k (G-k)),
            // the distribution under which each coalition's probability is
            // its kernel weight; unit regression weights then reproduce the
            // kernel-weighted objective in expectation.
            let size_weights: Vec<f64> =
                (1..g).map(|k| 1.0 / (k as f64 * (g - k) as f64)).collect();
            let total: f64 = size_weights.iter().sum();
            let mut rng = rng::stream(seed, 0);
            let mut masks = Vec::with_capacity(n);
            for _ in 0..n {
                let mut u = rng.random::<f64>() * total;
                let mut size = g - 1;
                for (i, w) in size_weights.iter().enumerate() {
                    if u < *w {
                        size = i + 1;
                        break;
                    }
                    u -= w;
                }
                let mut idx: Vec<usize> = (0..g).collect();
                for i in 0..size {
                    let j = rng.random_range(i..g);
                    idx.swap(i, j);
                }
                masks.push(IncludeSet::from_groups(idx[..size].iter().copied()));
            }
            let weights = vec![1.0; masks.len()];
            (masks, weights)
        }
        // One group: no interior coalitions; the constraints fix everything.
        Sampling::MonteCarlo(_) => (Vec::new(), Vec::new()),
    };

    // Index layout: interior masks first, then full, then empty.
    let m = masks.len();
    let mut points: Vec<(IncludeSet, u64)> = masks.iter().cloned().zip(0u64..).collect();
    points.push((IncludeSet::full(g), m as u64));
    points.push((IncludeSet::empty(), m as u64 + 1));
    let values = evaluate_points(f, &points)?;
    let full_vals = &values[m];
    let empty_vals = &values[m + 1];

    let design = mask_rows(&masks, g);
    let mut matrix = Vec::with_capacity(f.outputs());
    for t in 0..f.outputs() {
        if g == 1 {
            matrix.push(vec![full_vals[t] - empty_vals[t]]);
            continue;
        }
        let response: Vec<f64> = values[..m].iter().map(|v| v[t]).collect();
        let constraints = [
            Constraint { intercept: 1.0, coefficients: vec![0.0; g], rhs: empty_vals[t] },
            Constraint { intercept: 1.0, coefficients: vec![1.0; g], rhs: full_vals[t] },
        ];
        let solution =
            solve_weighted_ls(&design, &response, &weights, &constraints, None, RankPolicy::Fail)?;
        matrix.push(solution.coefficients);
    }

    Ok(AttributionScores::from_matrix(
        matrix,
        "kernel-shap",
        Some(seed),
        (m + 2) as u64,
        Some(m as u64),
    ))
}
