//! Weighted least squares with optional equality constraints.
//!
//! Surrogate methods reduce to one regression per output component: fit an
//! intercept plus one coefficient per feature group against weighted
//! observations of the set function, optionally pinned by affine equality
//! constraints (kernel SHAP anchors the intercept at f(empty) and the
//! coefficient sum at f(full) - f(empty)). The solver works on the KKT
//! system of the normal equations and reports rank problems by naming the
//! offending design columns instead of returning garbage.

use nalgebra::{DMatrix, DVector};

use crate::error::AttrError;

/// One affine equality constraint on the fitted parameters:
/// `intercept * beta0 + coefficients . beta = rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

/// What to do when the weighted design does not pin down a unique solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankPolicy {
    /// Return [`AttrError::RankDeficient`] naming the dependent columns.
    Fail,
    /// Return the minimum-norm least squares solution. Only supported for
    /// unconstrained problems; constrained deficient systems always fail.
    MinimumNorm,
}

/// Fitted parameters of one weighted regression.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsSolution {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

/// Relative tolerance for declaring a column dependent or a solve inaccurate.
const RANK_TOL: f64 = 1e-8;

fn validate(
    design: &[Vec<f64>],
    response: &[f64],
    weights: &[f64],
    constraints: &[Constraint],
    ridge: Option<f64>,
) -> Result<usize, AttrError> {
    let rows = design.len();
    if rows == 0 {
        return Err(AttrError::InvalidArg("regression needs at least one row".into()));
    }
    let cols = design[0].len();
    if design.iter().any(|r| r.len() != cols) {
        return Err(AttrError::Shape("design rows have differing lengths".into()));
    }
    if response.len() != rows || weights.len() != rows {
        return Err(AttrError::Shape(format!(
            "design has {rows} rows but response has {} and weights {}",
            response.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(AttrError::InvalidArg("regression weights must be finite and >= 0".into()));
    }
    if weights.iter().all(|w| *w == 0.0) && constraints.is_empty() {
        return Err(AttrError::InvalidArg("all regression weights are zero".into()));
    }
    if constraints.len() > 2 {
        return Err(AttrError::InvalidArg(format!(
            "at most two equality constraints are supported, got {}",
            constraints.len()
        )));
    }
    if constraints.iter().any(|c| c.coefficients.len() != cols) {
        return Err(AttrError::Shape("constraint arity does not match design".into()));
    }
    if let Some(l) = ridge {
        if !l.is_finite() || l < 0.0 {
            return Err(AttrError::InvalidArg("ridge penalty must be finite and >= 0".into()));
        }
    }
    Ok(cols)
}

/// Solve `min_beta sum_j w_j (y_j - beta0 - z_j . beta)^2 + ridge * |beta|^2`
/// subject to the given equality constraints. The intercept is never
/// penalized. `design` rows are the `z_j`; the intercept column is implicit.
pub fn solve_weighted_ls(
    design: &[Vec<f64>],
    response: &[f64],
    weights: &[f64],
    constraints: &[Constraint],
    ridge: Option<f64>,
    rank_policy: RankPolicy,
) -> Result<WlsSolution, AttrError> {
    let cols = validate(design, response, weights, constraints, ridge)?;
    let rows = design.len();
    let dim = cols + 1; // intercept + one slope per group
    let lambda = ridge.unwrap_or(0.0);

    // Normal matrix N = A^T W A (+ ridge on the slope block) where A = [1 | Z].
    let mut normal = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for j in 0..rows {
        let w = weights[j];
        if w == 0.0 {
            continue;
        }
        let mut a = Vec::with_capacity(dim);
        a.push(1.0);
        a.extend_from_slice(&design[j]);
        for p in 0..dim {
            rhs[p] += w * a[p] * response[j];
            for q in 0..dim {
                normal[(p, q)] += w * a[p] * a[q];
            }
        }
    }
    for p in 1..dim {
        normal[(p, p)] += lambda;
    }

    // KKT system: [N C^T; C 0] [x; nu] = [rhs; d].
    let c = constraints.len();
    let size = dim + c;
    let mut kkt = DMatrix::<f64>::zeros(size, size);
    let mut full_rhs = DVector::<f64>::zeros(size);
    kkt.view_mut((0, 0), (dim, dim)).copy_from(&normal);
    full_rhs.rows_mut(0, dim).copy_from(&rhs);
    for (i, con) in constraints.iter().enumerate() {
        kkt[(dim + i, 0)] = con.intercept;
        kkt[(0, dim + i)] = con.intercept;
        for q in 0..cols {
            kkt[(dim + i, 1 + q)] = con.coefficients[q];
            kkt[(1 + q, dim + i)] = con.coefficients[q];
        }
        full_rhs[dim + i] = con.rhs;
    }

    let scale = kkt.amax().max(full_rhs.amax()).max(1.0);
    let solution = kkt.clone().lu().solve(&full_rhs).and_then(|x| {
        // LU with partial pivoting can "solve" a singular system; accept only
        // solutions that actually satisfy the KKT equations.
        let residual = (&kkt * &x - &full_rhs).amax();
        let bound = RANK_TOL * scale * x.amax().max(1.0);
        (residual <= bound).then_some(x)
    });

    if let Some(x) = solution {
        return Ok(WlsSolution {
            intercept: x[0],
            coefficients: x.as_slice()[1..dim].to_vec(),
        });
    }

    match rank_policy {
        RankPolicy::MinimumNorm if constraints.is_empty() => {
            minimum_norm(design, response, weights, lambda, cols)
        }
        _ => Err(AttrError::RankDeficient { columns: deficient_columns(design, weights, constraints, cols) }),
    }
}

/// Minimum-norm least squares via SVD of the root-weighted design.
fn minimum_norm(
    design: &[Vec<f64>],
    response: &[f64],
    weights: &[f64],
    lambda: f64,
    cols: usize,
) -> Result<WlsSolution, AttrError> {
    let dim = cols + 1;
    let rows = design.len();
    // Ridge rows append sqrt(lambda) * e_p for each slope, turning the
    // penalized objective into an ordinary least squares problem.
    let extra = if lambda > 0.0 { cols } else { 0 };
    let mut a = DMatrix::<f64>::zeros(rows + extra, dim);
    let mut b = DVector::<f64>::zeros(rows + extra);
    for j in 0..rows {
        let s = weights[j].sqrt();
        a[(j, 0)] = s;
        for q in 0..cols {
            a[(j, 1 + q)] = s * design[j][q];
        }
        b[j] = s * response[j];
    }
    for q in 0..extra {
        a[(rows + q, 1 + q)] = lambda.sqrt();
    }
    let svd = a.svd(true, true);
    let x = svd
        .solve(&b, RANK_TOL)
        .map_err(|e| AttrError::InvalidArg(format!("minimum-norm solve failed: {e}")))?;
    Ok(WlsSolution {
        intercept: x[0],
        coefficients: x.as_slice()[1..dim].to_vec(),
    })
}

/// Name the design columns that are linearly dependent on earlier ones, via
/// pivot-free Gram-Schmidt on the root-weighted design stacked with the
/// constraint rows. Column 0 is the intercept.
fn deficient_columns(
    design: &[Vec<f64>],
    weights: &[f64],
    constraints: &[Constraint],
    cols: usize,
) -> Vec<String> {
    let rows = design.len();
    let dim = cols + 1;
    let total = rows + constraints.len();
    let mut m: Vec<Vec<f64>> = vec![vec![0.0; total]; dim];
    for j in 0..rows {
        let s = weights[j].sqrt();
        m[0][j] = s;
        for q in 0..cols {
            m[1 + q][j] = s * design[j][q];
        }
    }
    for (i, con) in constraints.iter().enumerate() {
        m[0][rows + i] = con.intercept;
        for q in 0..cols {
            m[1 + q][rows + i] = con.coefficients[q];
        }
    }

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut bad = Vec::new();
    for (idx, col) in m.into_iter().enumerate() {
        let original = norm(&col).max(1.0);
        let mut v = col;
        for u in &basis {
            let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let residual = norm(&v);
        if residual <= RANK_TOL * original {
            bad.push(if idx == 0 { "intercept".to_string() } else { format!("group {}", idx - 1) });
        } else {
            for x in v.iter_mut() {
                *x /= residual;
            }
            basis.push(v);
        }
    }
    if bad.is_empty() {
        bad.push("(unidentified)".to_string());
    }
    bad
}

/// Weighted lasso via coordinate descent:
/// `min sum_j w_j (y_j - beta0 - z_j . beta)^2 + lambda * sum_i |beta_i|`.
/// The intercept is unpenalized. Columns with no weighted variance get a
/// zero coefficient, which is the lasso limit rather than an error.
pub fn solve_weighted_lasso(
    design: &[Vec<f64>],
    response: &[f64],
    weights: &[f64],
    lambda: f64,
) -> Result<WlsSolution, AttrError> {
    let cols = validate(design, response, weights, &[], None)?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(AttrError::InvalidArg("lasso penalty must be finite and > 0".into()));
    }
    let rows = design.len();
    let weight_sum: f64 = weights.iter().sum();

    // Per-column curvature 2 sum_j w_j z_ji^2 is constant across sweeps.
    let curvature: Vec<f64> = (0..cols)
        .map(|i| 2.0 * (0..rows).map(|j| weights[j] * design[j][i] * design[j][i]).sum::<f64>())
        .collect();

    let mut beta = vec![0.0; cols];
    let mut beta0 = 0.0;
    let predict = |beta0: f64, beta: &[f64], j: usize| -> f64 {
        beta0 + design[j].iter().zip(beta).map(|(z, b)| z * b).sum::<f64>()
    };

    const MAX_SWEEPS: usize = 100_000;
    for _ in 0..MAX_SWEEPS {
        let mut delta: f64 = 0.0;
        let new0 = (0..rows)
            .map(|j| weights[j] * (response[j] - predict(0.0, &beta, j)))
            .sum::<f64>()
            / weight_sum;
        delta = delta.max((new0 - beta0).abs());
        beta0 = new0;
        for i in 0..cols {
            if curvature[i] == 0.0 {
                beta[i] = 0.0;
                continue;
            }
            // rho = 2 sum_j w_j z_ji (partial residual), soft-thresholded.
            let rho: f64 = 2.0
                * (0..rows)
                    .map(|j| {
                        let partial = response[j] - predict(beta0, &beta, j) + design[j][i] * beta[i];
                        weights[j] * design[j][i] * partial
                    })
                    .sum::<f64>();
            let new = soft_threshold(rho, lambda) / curvature[i];
            delta = delta.max((new - beta[i]).abs());
            beta[i] = new;
        }
        let scale = beta.iter().fold(beta0.abs(), |m, b| m.max(b.abs())).max(1.0);
        if delta <= 1e-12 * scale {
            break;
        }
    }

    Ok(WlsSolution { intercept: beta0, coefficients: beta })
}

fn soft_threshold(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masks(groups: usize) -> Vec<Vec<f64>> {
        (0..1u64 << groups)
            .map(|m| (0..groups).map(|g| ((m >> g) & 1) as f64).collect())
            .collect()
    }

    #[test]
    fn exact_linear_fit_recovers_coefficients() {
        let design = masks(3);
        let truth = [2.0, -1.5, 0.25];
        let response: Vec<f64> = design
            .iter()
            .map(|r| 0.75 + r.iter().zip(truth).map(|(z, t)| z * t).sum::<f64>())
            .collect();
        let weights = vec![1.0; design.len()];
        let sol = solve_weighted_ls(&design, &response, &weights, &[], None, RankPolicy::Fail).unwrap();
        assert!((sol.intercept - 0.75).abs() < 1e-10);
        for (c, t) in sol.coefficients.iter().zip(truth) {
            assert!((c - t).abs() < 1e-10, "{c} vs {t}");
        }
    }

    #[test]
    fn zero_weight_rows_are_ignored() {
        let design = masks(2);
        let mut response: Vec<f64> = design.iter().map(|r| 1.0 + r[0] - 2.0 * r[1]).collect();
        let mut weights = vec![1.0; 4];
        // Corrupt a row, then silence it.
        response[2] = 1000.0;
        weights[2] = 0.0;
        // Duplicate the silenced point so the slope stays identifiable.
        let mut design = design;
        design.push(vec![0.0, 1.0]);
        response.push(1.0 + 0.0 - 2.0);
        weights.push(1.0);
        let sol = solve_weighted_ls(&design, &response, &weights, &[], None, RankPolicy::Fail).unwrap();
        assert!((sol.intercept - 1.0).abs() < 1e-9);
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-9);
        assert!((sol.coefficients[1] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_informative_row_minimum_norm() {
        // Only one observation: z = (1, 0), y = 2. Exact fits satisfy
        // beta0 + beta1 = 2; the minimum-norm representative splits it
        // evenly and leaves the unseen coordinate at zero.
        let design = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let response = vec![2.0, 7.0, 9.0];
        let weights = vec![1.0, 0.0, 0.0];
        let sol =
            solve_weighted_ls(&design, &response, &weights, &[], None, RankPolicy::MinimumNorm).unwrap();
        assert!((sol.intercept - 1.0).abs() < 1e-9, "{sol:?}");
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-9, "{sol:?}");
        assert!(sol.coefficients[1].abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn duplicate_column_fails_with_names() {
        // Second group is a copy of the first.
        let design = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ];
        let response = vec![0.0, 1.0, 2.0, 3.0];
        let weights = vec![1.0; 4];
        let err =
            solve_weighted_ls(&design, &response, &weights, &[], None, RankPolicy::Fail).unwrap_err();
        match err {
            AttrError::RankDeficient { columns } => {
                assert_eq!(columns, vec!["group 1".to_string()]);
            }
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn constraints_are_satisfied_exactly() {
        let design = masks(3);
        let response: Vec<f64> =
            design.iter().map(|r| 0.3 + 1.1 * r[0] - 0.4 * r[1] + 0.9 * r[2]).collect();
        let weights: Vec<f64> = (0..design.len()).map(|j| 0.25 + j as f64).collect();
        let c0 = Constraint { intercept: 1.0, coefficients: vec![0.0; 3], rhs: 0.3 };
        let c1 = Constraint { intercept: 1.0, coefficients: vec![1.0; 3], rhs: 0.3 + 1.1 - 0.4 + 0.9 };
        let sol = solve_weighted_ls(&design, &response, &weights, &[c0, c1], None, RankPolicy::Fail)
            .unwrap();
        assert!((sol.intercept - 0.3).abs() < 1e-9);
        let total: f64 = sol.coefficients.iter().sum();
        assert!((sol.intercept + total - 1.9).abs() < 1e-9);
    }

    #[test]
    fn constrained_deficient_system_fails_even_under_minimum_norm() {
        let design = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let response = vec![1.0, 1.0];
        let weights = vec![1.0, 1.0];
        let c = Constraint { intercept: 1.0, coefficients: vec![0.0, 0.0], rhs: 0.0 };
        let err = solve_weighted_ls(&design, &response, &weights, &[c], None, RankPolicy::MinimumNorm)
            .unwrap_err();
        assert!(matches!(err, AttrError::RankDeficient { .. }), "{err:?}");
    }

    #[test]
    fn ridge_shrinks_coefficient_norm_monotonically() {
        let design = masks(3);
        // Slightly noisy responses so the fit is not exact.
        let bumps = [0.03, -0.02, 0.05, -0.04, 0.01, 0.02, -0.05, 0.04];
        let response: Vec<f64> = design
            .iter()
            .zip(bumps)
            .map(|(r, b)| 0.5 + 2.0 * r[0] - 1.0 * r[1] + 0.5 * r[2] + b)
            .collect();
        let weights = vec![1.0; design.len()];
        let norm_at = |lambda: f64| -> f64 {
            let ridge = if lambda == 0.0 { None } else { Some(lambda) };
            let sol =
                solve_weighted_ls(&design, &response, &weights, &[], ridge, RankPolicy::Fail).unwrap();
            sol.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
        };
        let n0 = norm_at(0.0);
        let n1 = norm_at(1.0);
        let n2 = norm_at(1000.0);
        assert!(n0 > n1, "{n0} vs {n1}");
        assert!(n1 > n2, "{n1} vs {n2}");
        assert!(n2 < 0.05, "{n2}");
    }

    #[test]
    fn ridge_makes_duplicate_columns_solvable() {
        let design = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![0.0, 0.0],
        ];
        let response = vec![0.0, 2.0, 2.0, 0.0];
        let weights = vec![1.0; 4];
        let sol = solve_weighted_ls(&design, &response, &weights, &[], Some(1e-4), RankPolicy::Fail)
            .unwrap();
        // Identical columns share the effect evenly under a ridge penalty.
        assert!((sol.coefficients[0] - sol.coefficients[1]).abs() < 1e-9);
        assert!((sol.coefficients[0] + sol.coefficients[1] - 2.0).abs() < 1e-2);
    }

    #[test]
    fn lasso_large_penalty_zeroes_everything() {
        let design = masks(3);
        let response: Vec<f64> = design.iter().map(|r| 1.0 + r[0] + 2.0 * r[1] - r[2]).collect();
        let weights = vec![1.0; design.len()];
        let sol = solve_weighted_lasso(&design, &response, &weights, 1e6).unwrap();
        for c in &sol.coefficients {
            assert_eq!(*c, 0.0);
        }
        // Intercept absorbs the weighted mean.
        let mean: f64 = response.iter().sum::<f64>() / response.len() as f64;
        assert!((sol.intercept - mean).abs() < 1e-9);
    }

    #[test]
    fn lasso_small_penalty_approaches_true_coefficients() {
        let design = masks(3);
        let truth = [1.5, -2.0, 0.75];
        let response: Vec<f64> = design
            .iter()
            .map(|r| 0.25 + r.iter().zip(truth).map(|(z, t)| z * t).sum::<f64>())
            .collect();
        let weights = vec![1.0; design.len()];
        let sol = solve_weighted_lasso(&design, &response, &weights, 1e-8).unwrap();
        for (c, t) in sol.coefficients.iter().zip(truth) {
            assert!((c - t).abs() < 1e-6, "{c} vs {t}");
        }
    }

    #[test]
    fn lasso_shrinkage_is_monotone_in_penalty() {
        let design = masks(3);
        let response: Vec<f64> = design.iter().map(|r| r[0] + 3.0 * r[1] - 2.0 * r[2]).collect();
        let weights = vec![1.0; design.len()];
        let l1 = |lambda: f64| -> f64 {
            let sol = solve_weighted_lasso(&design, &response, &weights, lambda).unwrap();
            sol.coefficients.iter().map(|c| c.abs()).sum()
        };
        let a = l1(0.01);
        let b = l1(1.0);
        let c = l1(10.0);
        assert!(a >= b && b >= c, "{a} {b} {c}");
        assert!(a > c);
    }

    #[test]
    fn lasso_ignores_constant_zero_column() {
        let design = vec![vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]];
        let response = vec![2.0, 1.0, 2.0, 1.0];
        let weights = vec![1.0; 4];
        let sol = solve_weighted_lasso(&design, &response, &weights, 1e-9).unwrap();
        assert_eq!(sol.coefficients[0], 0.0);
        assert!((sol.coefficients[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_malformed_inputs() {
        let design = vec![vec![1.0, 0.0]];
        assert!(matches!(
            solve_weighted_ls(&design, &[1.0, 2.0], &[1.0], &[], None, RankPolicy::Fail),
            Err(AttrError::Shape(_))
        ));
        assert!(matches!(
            solve_weighted_ls(&design, &[1.0], &[-1.0], &[], None, RankPolicy::Fail),
            Err(AttrError::InvalidArg(_))
        ));
        let too_many: Vec<Constraint> = (0..3)
            .map(|i| Constraint { intercept: 1.0, coefficients: vec![0.0, 0.0], rhs: i as f64 })
            .collect();
        assert!(matches!(
            solve_weighted_ls(&design, &[1.0], &[1.0], &too_many, None, RankPolicy::Fail),
            Err(AttrError::InvalidArg(_))
        ));
        assert!(matches!(
            solve_weighted_lasso(&design, &[1.0], &[1.0], 0.0),
            Err(AttrError::InvalidArg(_))
        ));
    }
}
