//! Zero-noise extrapolation fits and noise-informed nonlinear fitting.
//!
//! Noise-agnostic extrapolation works on `(eta, B_est)` ensembles; the
//! noise-informed fits work on raw probabilities with the damping rate as an
//! extra free parameter.

use thiserror::Error;

use crate::analytic::{p1_local_ad, p1_local_pd};
use crate::channels::NoiseKind;
use crate::densmat::{hermitian_eigenvalues, ComplexMatrix};
use num_complex::Complex64;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("abscissa values are degenerate")]
    DegenerateAbscissa,
    #[error("duplicate abscissa value {0}")]
    DuplicateAbscissa(f64),
    #[error("non-finite value in fit input")]
    NonFinite,
    #[error("fit kind {0:?} is not an extrapolation method")]
    NotExtrapolation(FitKind),
}

/// Supported fitting procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Linear,
    Richardson,
    Exponential,
    InformedPd,
    InformedAd,
    RamseyFringePd,
    RamseyFringeAd,
}

/// Outcome of a fit. `converged == false` marks non-convergence or a
/// degenerate (ill-conditioned) solution; the outputs stay finite either way.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub value_at_zero: f64,
    pub params: Vec<(String, f64)>,
    pub converged: bool,
    pub residual_norm: f64,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

fn check_finite(points: &[(f64, f64)]) -> Result<(), FitError> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok(())
}

/// Least-squares line through the points; `value_at_zero` is the intercept.
pub fn fit_linear(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if points.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: points.len() });
    }
    check_finite(points)?;
    let n = points.len() as f64;
    let x_mean = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let y_mean = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - x_mean) * (x - x_mean)).sum();
    if sxx == 0.0 {
        return Err(FitError::DegenerateAbscissa);
    }
    let sxy: f64 = points.iter().map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual_norm = points
        .iter()
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitResult {
        value_at_zero: intercept,
        params: vec![("intercept".into(), intercept), ("slope".into(), slope)],
        converged: true,
        residual_norm,
    })
}

/// Lagrange interpolating polynomial through all points, evaluated at
/// `x = 0` (polynomial degree is one less than the number of points).
pub fn fit_richardson(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if points.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: points.len() });
    }
    check_finite(points)?;
    for (i, (xi, _)) in points.iter().enumerate() {
        for (xj, _) in &points[i + 1..] {
            if xi == xj {
                return Err(FitError::DuplicateAbscissa(*xi));
            }
        }
    }
    let mut value = 0.0;
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut weight = 1.0;
        for (j, (xj, _)) in points.iter().enumerate() {
            if i != j {
                weight *= xj / (xj - xi);
            }
        }
        value += weight * yi;
    }
    Ok(FitResult {
        value_at_zero: value,
        params: vec![("degree".into(), (points.len() - 1) as f64)],
        converged: true,
        residual_norm: 0.0,
    })
}

// ---------------------------------------------------------------------------
// Damped Gauss-Newton (Levenberg-Marquardt) on box-constrained parameters.

const LM_MAX_ITERS: usize = 500;
const LM_STEP_TOL: f64 = 1e-10;
/// Condition-number bound on J^T J above which a solution is flagged
/// degenerate.
const LM_COND_LIMIT: f64 = 1e10;

struct LmOutcome {
    params: Vec<f64>,
    converged: bool,
    residual_norm: f64,
}

fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        let pivot_b = b[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            for (cell, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *cell -= f * p;
            }
            b[col + 1 + offset] -= f * pivot_b;
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = b[col];
        for k in col + 1..n {
            v -= a[col][k] * x[k];
        }
        x[col] = v / a[col][col];
    }
    Some(x)
}

fn condition_number(jtj: &[Vec<f64>]) -> f64 {
    let n = jtj.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = Complex64::new(jtj[i][j], 0.0);
        }
    }
    let eig = hermitian_eigenvalues(&m);
    let max = eig.last().copied().unwrap_or(0.0);
    let min = eig.first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn levenberg_marquardt<F>(residual_fn: F, init: &[f64], lower: &[f64], upper: &[f64]) -> LmOutcome
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let dim = init.len();
    let clamp = |p: &mut Vec<f64>| {
        for i in 0..dim {
            p[i] = p[i].clamp(lower[i], upper[i]);
        }
    };
    let mut params: Vec<f64> = init.to_vec();
    clamp(&mut params);
    let cost_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut residuals = residual_fn(&params);
    let mut cost = cost_of(&residuals);
    let n_res = residuals.len();
    let mut damping = 1e-3;
    let mut converged = false;
    let mut last_jtj: Option<Vec<Vec<f64>>> = None;

    for _ in 0..LM_MAX_ITERS {
        // Jacobian by central differences, one-sided at the box boundary.
        let mut jac = vec![vec![0.0; dim]; n_res];
        for p_idx in 0..dim {
            let h = 1e-6 * params[p_idx].abs().max(1.0);
            let hi = (params[p_idx] + h).min(upper[p_idx]);
            let lo = (params[p_idx] - h).max(lower[p_idx]);
            let span = hi - lo;
            if span <= 0.0 {
                continue;
            }
            let mut p_hi = params.clone();
            p_hi[p_idx] = hi;
            let mut p_lo = params.clone();
            p_lo[p_idx] = lo;
            let r_hi = residual_fn(&p_hi);
            let r_lo = residual_fn(&p_lo);
            for (row, j_row) in jac.iter_mut().enumerate() {
                j_row[p_idx] = (r_hi[row] - r_lo[row]) / span;
            }
        }
        let mut jtj = vec![vec![0.0; dim]; dim];
        let mut jtr = vec![0.0; dim];
        for i in 0..dim {
            for j in 0..dim {
                jtj[i][j] = (0..n_res).map(|r| jac[r][i] * jac[r][j]).sum();
            }
            jtr[i] = (0..n_res).map(|r| jac[r][i] * residuals[r]).sum();
        }
        last_jtj = Some(jtj.clone());

        let mut accepted = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for i in 0..dim {
                lhs[i][i] += damping * jtj[i][i].max(1e-12);
            }
            let mut rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = solve_small(&mut lhs, &mut rhs) else {
                damping *= 10.0;
                continue;
            };
            let mut candidate = params.clone();
            for i in 0..dim {
                candidate[i] += step[i];
            }
            clamp(&mut candidate);
            let cand_res = residual_fn(&candidate);
            let cand_cost = cost_of(&cand_res);
            if cand_cost.is_finite() && cand_cost <= cost {
                let moved: f64 = params
                    .iter()
                    .zip(&candidate)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                params = candidate;
                residuals = cand_res;
                cost = cand_cost;
                damping = (damping / 10.0).max(1e-14);
                accepted = true;
                if moved < LM_STEP_TOL * (1.0 + params.iter().map(|p| p * p).sum::<f64>().sqrt()) {
                    converged = true;
                }
                break;
            }
            damping *= 10.0;
        }
        if converged || !accepted {
            break;
        }
    }

    if converged {
        if let Some(jtj) = &last_jtj {
            if condition_number(jtj) > LM_COND_LIMIT {
                converged = false;
            }
        }
    }
    LmOutcome { params, converged, residual_norm: cost.sqrt() }
}

// ---------------------------------------------------------------------------

/// Heuristic starting point for `y = a + b e^(-c x)` when none is supplied.
fn exponential_init(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let (x0, y0) = points[0];
    let (x_last, y_last) = *points.last().expect("nonempty");
    let a = y_last;
    let mid = points[points.len() / 2];
    let num = y0 - a;
    let den = mid.1 - a;
    let c = if num != 0.0 && den != 0.0 && (num / den) > 0.0 && mid.0 != x0 {
        ((num / den).ln() / (mid.0 - x0)).abs().max(1e-3)
    } else {
        1.0 / (x_last - x0).abs().max(1e-3)
    };
    let b = num * (c * x0).exp();
    (a, b, c)
}

/// Least-squares fit of `y = a + b e^(-c x)`; `value_at_zero = a + b`.
///
/// Non-convergence is flagged on the result, never an error.
pub fn fit_exponential(
    points: &[(f64, f64)],
    init: Option<(f64, f64, f64)>,
) -> Result<FitResult, FitError> {
    if points.len() < 3 {
        return Err(FitError::InsufficientData { needed: 3, got: points.len() });
    }
    check_finite(points)?;
    let (a0, b0, c0) = init.unwrap_or_else(|| exponential_init(points));
    let data = points.to_vec();
    let outcome = levenberg_marquardt(
        |p| data.iter().map(|(x, y)| p[0] + p[1] * (-p[2] * x).exp() - y).collect(),
        &[a0, b0, c0],
        &[f64::NEG_INFINITY; 3],
        &[f64::INFINITY; 3],
    );
    let (a, b, c) = (outcome.params[0], outcome.params[1], outcome.params[2]);
    Ok(FitResult {
        value_at_zero: a + b,
        params: vec![("a".into(), a), ("b".into(), b), ("c".into(), c)],
        converged: outcome.converged,
        residual_norm: outcome.residual_norm,
    })
}

fn fit_two_param_model<M>(
    model: M,
    data: &[(f64, f64)],
    init: (f64, f64),
    rate_name: &str,
) -> FitResult
where
    M: Fn(f64, f64, f64) -> f64,
{
    let pts = data.to_vec();
    let outcome = levenberg_marquardt(
        |p| pts.iter().map(|(x, y)| model(p[0], p[1], *x) - y).collect(),
        &[init.0, init.1],
        &[f64::NEG_INFINITY, 0.0],
        &[f64::INFINITY, 1.0],
    );
    let (b, rate) = (outcome.params[0], outcome.params[1]);
    FitResult {
        value_at_zero: b,
        params: vec![("B_est".into(), b), (rate_name.into(), rate)],
        converged: outcome.converged,
        residual_norm: outcome.residual_norm,
    }
}

fn check_informed_data(data: &[(u32, f64)]) -> Result<(), FitError> {
    if data.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: data.len() });
    }
    let mut folds: Vec<u32> = data.iter().map(|(m, _)| *m).collect();
    folds.sort_unstable();
    folds.dedup();
    if folds.len() < 2 {
        return Err(FitError::DegenerateAbscissa);
    }
    if data.iter().any(|(_, p)| !p.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok(())
}

/// Two-parameter fit of `(B, lambda)` against the folded phase-damping
/// fringe at fixed sensing time `t`, with the fold count as the independent
/// variable. The rate is box-constrained to [0, 1].
pub fn fit_informed_pd(
    data: &[(u32, f64)],
    t: f64,
    init: (f64, f64),
) -> Result<FitResult, FitError> {
    check_informed_data(data)?;
    let pts: Vec<(f64, f64)> = data.iter().map(|(m, p)| (f64::from(*m), *p)).collect();
    Ok(fit_two_param_model(
        |b, lambda, m| p1_local_pd(lambda, b, t, m as u32),
        &pts,
        init,
        "lambda_est",
    ))
}

/// Amplitude-damping analog of [`fit_informed_pd`], fitting `(B, gamma)`
/// against the folded fringe with `n = m` fold pairs.
pub fn fit_informed_ad(
    data: &[(u32, f64)],
    t: f64,
    init: (f64, f64),
) -> Result<FitResult, FitError> {
    check_informed_data(data)?;
    let pts: Vec<(f64, f64)> = data.iter().map(|(m, p)| (f64::from(*m), *p)).collect();
    Ok(fit_two_param_model(
        |b, gamma, m| p1_local_ad(gamma, b, t, m as u32, m as u32),
        &pts,
        init,
        "gamma_est",
    ))
}

/// Equally spaced Ramsey fringe times `t_j = j t_R`, `j = 1..=levels`, chosen
/// so the total sensing time matches `levels * t_zne`:
/// `t_R = 2 levels t_zne / (levels (levels + 1))`.
pub fn ramsey_time_grid(levels: u32, t_zne: f64) -> Vec<f64> {
    let t_r = 2.0 * t_zne / (f64::from(levels) + 1.0);
    (1..=levels).map(|j| f64::from(j) * t_r).collect()
}

/// Fits `(B, rate)` to an unfolded noisy fringe sampled at several sensing
/// times.
pub fn fit_ramsey_fringes(
    data: &[(f64, f64)],
    kind: NoiseKind,
    init: (f64, f64),
) -> Result<FitResult, FitError> {
    if data.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: data.len() });
    }
    check_finite(data)?;
    let mut times: Vec<f64> = data.iter().map(|(t, _)| *t).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    if times.len() < 2 {
        return Err(FitError::DegenerateAbscissa);
    }
    let (model, rate_name): (fn(f64, f64, f64) -> f64, _) = match kind {
        NoiseKind::PhaseDamping => {
            (|b, lambda, t| p1_local_pd(lambda, b, t, 0), "lambda_est")
        }
        NoiseKind::AmplitudeDamping => {
            (|b, gamma, t| p1_local_ad(gamma, b, t, 0, 0), "gamma_est")
        }
    };
    Ok(fit_two_param_model(model, data, init, rate_name))
}

/// Extrapolates a `(eta, B_est)` ensemble to `eta = 0`.
pub fn extrapolate(
    ensemble: &[(f64, f64)],
    kind: FitKind,
    init: Option<(f64, f64, f64)>,
) -> Result<f64, FitError> {
    match kind {
        FitKind::Linear => Ok(fit_linear(ensemble)?.value_at_zero),
        FitKind::Richardson => Ok(fit_richardson(ensemble)?.value_at_zero),
        FitKind::Exponential => Ok(fit_exponential(ensemble, init)?.value_at_zero),
        other => Err(FitError::NotExtrapolation(other)),
    }
}
