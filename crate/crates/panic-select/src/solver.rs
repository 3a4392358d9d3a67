//! Proximal-gradient solver for `min R_n(beta0, beta) + lambda * g(beta)`.
//!
//! The slope block takes a proximal step, the intercept an unpenalized
//! gradient step, both with a shared backtracking line search on the smooth
//! part. Backtracking guarantees a non-increasing objective, and the
//! reported solution carries its KKT (subgradient) residual so callers can
//! judge convergence. The initial step size comes from a power-iteration
//! estimate of the largest curvature eigenvalue at the starting point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{self, CoefficientVector, Dataset, Family};
use crate::penalty::{self, PenaltySpec};

const MAX_BACKTRACKS: usize = 100;
// Generous: slow geometric tails on ill-conditioned problems spend many
// iterations below the objective floor before the KKT residual catches up.
const STALL_LIMIT: usize = 1000;
const POWER_ITERATIONS: usize = 25;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Subgradient residual below which the fit counts as converged.
    pub tol_kkt: f64,
    /// Relative objective-decrease floor; persistent stalls below it end the
    /// iteration early.
    pub tol_objective: f64,
    /// Backtracking shrink factor in (0, 1).
    pub shrink: f64,
    /// Accelerated (momentum) variant. Off by default: the plain method has
    /// a monotone objective, which the diagnostics rely on.
    pub use_fista: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 50_000,
            tol_kkt: 1e-7,
            tol_objective: 1e-12,
            shrink: 0.5,
            use_fista: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be positive".into()));
        }
        if !(self.tol_kkt > 0.0) || !(self.tol_objective > 0.0) {
            return Err(Error::InvalidInput("solver tolerances must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidInput(format!(
                "backtracking shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        Ok(())
    }
}

/// Solution of one penalized problem.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub beta: CoefficientVector,
    pub lambda: f64,
    /// `risk + lambda * penalty` at the solution.
    pub objective: f64,
    /// Empirical risk alone.
    pub risk: f64,
    /// `g(beta)` at the solution (0 for unpenalized fits).
    pub penalty: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Subgradient residual at the reported iterate.
    pub kkt_residual: f64,
}

/// Extra solver inputs beyond the public signature.
#[derive(Debug, Clone, Copy, Default)]
pub struct FitOptions<'a> {
    pub warm_start: Option<&'a CoefficientVector>,
    /// Reusable step size (1 / Lipschitz estimate) from a previous solve on
    /// the same data.
    pub step_hint: Option<f64>,
}

/// Solve `min R_n + lambda * g` by proximal gradient with backtracking.
///
/// Returns `converged = false` with the best iterate when the KKT residual
/// never reaches `tol_kkt`; the caller decides what to do with it.
pub fn fit_penalized(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    lambda: f64,
    config: &SolverConfig,
    warm_start: Option<&CoefficientVector>,
) -> Result<FitResult> {
    fit_penalized_with(
        family,
        data,
        spec,
        lambda,
        config,
        FitOptions {
            warm_start,
            step_hint: None,
        },
    )
}

pub fn fit_penalized_with(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    lambda: f64,
    config: &SolverConfig,
    opts: FitOptions<'_>,
) -> Result<FitResult> {
    config.validate()?;
    spec.validate()?;
    data.validate_for(family)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "lambda must be a nonnegative real, got {lambda}"
        )));
    }

    let d = data.d();
    let mut beta = match opts.warm_start {
        Some(w) => {
            if w.slopes.len() != d {
                return Err(Error::InvalidInput(format!(
                    "warm start dimension {} does not match data dimension {d}",
                    w.slopes.len()
                )));
            }
            w.clone()
        }
        None => CoefficientVector::zeros(d),
    };

    let risk_shift = glm::risk_constant(family, data);
    let mut step = opts
        .step_hint
        .filter(|s| *s > 0.0 && s.is_finite())
        .unwrap_or_else(|| initial_step(family, data, &beta));

    let (mut risk, mut grad0, mut grad) = match glm::core_risk_and_gradient(family, &beta, data) {
        Ok(v) => v,
        Err(e) => {
            if opts.warm_start.is_some() {
                // A bad warm start is recoverable; the origin is always in
                // the domain of every family.
                beta = CoefficientVector::zeros(d);
                glm::core_risk_and_gradient(family, &beta, data)?
            } else {
                return Err(e);
            }
        }
    };
    let mut pen = penalty::penalty_value(spec, &beta.slopes);
    let mut objective = risk + lambda * pen;
    let mut kkt = kkt_residual(spec, lambda, &beta.slopes, grad0, &grad);

    let mut iterations = 0;
    let mut converged = kkt <= config.tol_kkt;
    let mut stall = 0usize;

    // Momentum state (only touched when use_fista is set).
    let mut previous = beta.clone();
    let mut momentum = 1.0f64;

    while !converged && iterations < config.max_iterations {
        let (point, point_grad0, point_grad, point_risk);
        if config.use_fista && iterations > 0 {
            let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            let w = (momentum - 1.0) / next_momentum;
            momentum = next_momentum;
            let extrapolated = CoefficientVector::new(
                beta.intercept + w * (beta.intercept - previous.intercept),
                beta.slopes
                    .iter()
                    .zip(&previous.slopes)
                    .map(|(b, p)| b + w * (b - p))
                    .collect(),
            );
            match glm::core_risk_and_gradient(family, &extrapolated, data) {
                Ok((r, g0, g)) => {
                    point = extrapolated;
                    point_risk = r;
                    point_grad0 = g0;
                    point_grad = g;
                }
                Err(_) => {
                    // Extrapolation left the domain; restart momentum.
                    momentum = 1.0;
                    point = beta.clone();
                    point_risk = risk;
                    point_grad0 = grad0;
                    point_grad = grad.clone();
                }
            }
        } else {
            point = beta.clone();
            point_risk = risk;
            point_grad0 = grad0;
            point_grad = grad.clone();
        }

        let Some((candidate, accepted_step)) = backtrack(
            family,
            data,
            spec,
            lambda,
            config,
            &point,
            point_risk,
            point_grad0,
            &point_grad,
            step,
        ) else {
            break; // Step size underflow: no further progress possible.
        };
        step = accepted_step;

        previous = std::mem::replace(&mut beta, candidate);
        iterations += 1;

        let (r, g0, g) = glm::core_risk_and_gradient(family, &beta, data)?;
        risk = r;
        grad0 = g0;
        grad = g;
        pen = penalty::penalty_value(spec, &beta.slopes);
        let new_objective = risk + lambda * pen;

        if config.use_fista && new_objective > objective {
            momentum = 1.0; // adaptive restart
        }
        if objective - new_objective <= config.tol_objective * objective.abs().max(1.0) {
            stall += 1;
        } else {
            stall = 0;
        }
        objective = new_objective;

        kkt = kkt_residual(spec, lambda, &beta.slopes, grad0, &grad);
        if kkt <= config.tol_kkt {
            converged = true;
            break;
        }
        if stall >= STALL_LIMIT {
            break;
        }
    }

    let risk_full = risk + risk_shift;
    Ok(FitResult {
        beta,
        lambda,
        objective: risk_full + lambda * pen,
        risk: risk_full,
        penalty: pen,
        iterations,
        converged,
        kkt_residual: kkt,
    })
}

/// Unpenalized empirical risk minimization (`lambda = 0`). The reported
/// penalty is 0 because no regularizer is in play; `converged = false` flags
/// ill-posed problems such as separable logistic data.
pub fn fit_erm(family: &Family, data: &Dataset, config: &SolverConfig) -> Result<FitResult> {
    let mut fit = fit_penalized(family, data, &PenaltySpec::L1, 0.0, config, None)?;
    fit.penalty = 0.0;
    fit.objective = fit.risk;
    Ok(fit)
}

/// Backtracking proximal step from `point`. Returns the accepted candidate
/// and the step size that produced it, or `None` on step underflow.
#[allow(clippy::too_many_arguments)]
fn backtrack(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    lambda: f64,
    config: &SolverConfig,
    point: &CoefficientVector,
    point_risk: f64,
    grad0: f64,
    grad: &[f64],
    step: f64,
) -> Option<(CoefficientVector, f64)> {
    let mut s = step;
    for _ in 0..MAX_BACKTRACKS {
        let intercept = point.intercept - s * grad0;
        let moved: Vec<f64> = point
            .slopes
            .iter()
            .zip(grad)
            .map(|(b, g)| b - s * g)
            .collect();
        let slopes = penalty::prox(spec, lambda, s, &moved);
        let candidate = CoefficientVector::new(intercept, slopes);

        if let Ok(candidate_risk) = glm::core_risk(family, &candidate, data) {
            let d0 = candidate.intercept - point.intercept;
            let mut linear = grad0 * d0;
            let mut squared = d0 * d0;
            for ((c, p), g) in candidate.slopes.iter().zip(&point.slopes).zip(grad) {
                let dj = c - p;
                linear += g * dj;
                squared += dj * dj;
            }
            let bound = point_risk + linear + squared / (2.0 * s);
            if candidate_risk <= bound + 1e-12 * point_risk.abs().max(1.0) {
                return Some((candidate, s));
            }
        }
        s *= config.shrink;
        if s < 1e-300 {
            return None;
        }
    }
    None
}

/// Subgradient residual of the penalized objective at `(grad0, grad)`.
///
/// For L1: `max(0, |g_j| - lambda)` on zero coordinates and
/// `|g_j + lambda sign(beta_j)|` elsewhere; intercept contributes `|g_0|`.
/// Analogous conditions for the L2 norm and the elastic net.
pub fn kkt_residual(
    spec: &PenaltySpec,
    lambda: f64,
    slopes: &[f64],
    grad0: f64,
    grad: &[f64],
) -> f64 {
    let mut r: f64 = grad0.abs();
    if lambda == 0.0 {
        for g in grad {
            r = r.max(g.abs());
        }
        return r;
    }
    match spec {
        PenaltySpec::L1 => {
            for (b, g) in slopes.iter().zip(grad) {
                let c = if *b == 0.0 {
                    (g.abs() - lambda).max(0.0)
                } else {
                    (g + lambda * b.signum()).abs()
                };
                r = r.max(c);
            }
        }
        PenaltySpec::L2 => {
            let norm = slopes.iter().map(|b| b * b).sum::<f64>().sqrt();
            if norm == 0.0 {
                let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                r = r.max((gnorm - lambda).max(0.0));
            } else {
                for (b, g) in slopes.iter().zip(grad) {
                    r = r.max((g + lambda * b / norm).abs());
                }
            }
        }
        PenaltySpec::ElasticNet { alpha } => {
            for (b, g) in slopes.iter().zip(grad) {
                let c = if *b == 0.0 {
                    (g.abs() - lambda * alpha).max(0.0)
                } else {
                    (g + lambda * (alpha * b.signum() + 2.0 * (1.0 - alpha) * b)).abs()
                };
                r = r.max(c);
            }
        }
    }
    r
}

/// Inverse of a power-iteration estimate of the largest eigenvalue of the
/// linearized curvature matrix `(1/n) sum_i w_i [1 x_i][1 x_i]^T` at the
/// starting point. Falls back to 1.0 when the estimate degenerates.
fn initial_step(family: &Family, data: &Dataset, at: &CoefficientVector) -> f64 {
    default_step(family, data, at).unwrap_or(1.0)
}

/// Step size reusable across a chain of solves on the same data.
pub(crate) fn default_step(
    family: &Family,
    data: &Dataset,
    at: &CoefficientVector,
) -> Option<f64> {
    estimate_curvature(family, data, at)
        .filter(|l| *l > 1e-12)
        .map(|l| 1.0 / l)
}

fn estimate_curvature(family: &Family, data: &Dataset, at: &CoefficientVector) -> Option<f64> {
    if matches!(family, Family::Linear) {
        // Hessian is constant: 2 X~'X~ / n, already cached.
        let stats = data.quad_stats();
        let p = data.d() + 1;
        let mut v = vec![1.0; p];
        let mut eigen = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let mut u = vec![0.0; p];
            for a in 0..p {
                u[a] = 2.0 * glm::dot(&stats.xtx[a * p..(a + 1) * p], &v);
            }
            eigen = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if eigen <= 1e-300 || !eigen.is_finite() {
                return None;
            }
            for (vj, uj) in v.iter_mut().zip(&u) {
                *vj = uj / eigen;
            }
        }
        return Some(eigen);
    }
    let n = data.n();
    let d = data.d();
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let w = match family {
            Family::Linear => 2.0,
            Family::Logistic => 0.25,
            Family::Poisson => {
                let z = at.linear_predictor(data.row(i));
                if z > glm::EXP_LIMIT {
                    return None;
                }
                z.exp()
            }
            Family::Gamma { shape } => {
                let z = at.linear_predictor(data.row(i));
                if -z > glm::EXP_LIMIT {
                    return None;
                }
                shape * data.y()[i] * (-z).exp()
            }
        };
        if !w.is_finite() {
            return None;
        }
        weights.push(w);
    }

    let mut v0 = 1.0;
    let mut v = vec![1.0; d];
    let mut eigen = 0.0;
    let scale = 1.0 / n as f64;
    for _ in 0..POWER_ITERATIONS {
        let mut u0 = 0.0;
        let mut u = vec![0.0; d];
        for i in 0..n {
            let row = data.row(i);
            let t = weights[i] * (v0 + glm::dot(row, &v)) * scale;
            u0 += t;
            for (uj, xj) in u.iter_mut().zip(row) {
                *uj += t * xj;
            }
        }
        eigen = (u0 * u0 + u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if eigen <= 1e-300 || !eigen.is_finite() {
            return None;
        }
        v0 = u0 / eigen;
        for (vj, uj) in v.iter_mut().zip(&u) {
            *vj = uj / eigen;
        }
    }
    Some(eigen)
}

/// Fit with all slopes pinned to exact zero: the 1-D intercept problem has a
/// closed form in every family (mean for linear, logit of the label mean for
/// logistic, log of the response mean for Poisson and Gamma).
///
/// Degenerate responses (single logistic class, all-zero Poisson counts)
/// have no finite optimum; the intercept is capped and `converged = false`.
pub fn intercept_only_fit(family: &Family, data: &Dataset) -> Result<FitResult> {
    data.validate_for(family)?;
    let n = data.n() as f64;
    let mean_y = data.y().iter().sum::<f64>() / n;
    const CAP: f64 = 30.0;
    let (intercept, converged) = match family {
        Family::Linear => (mean_y, true),
        Family::Logistic => {
            if mean_y <= 0.0 {
                (-CAP, false)
            } else if mean_y >= 1.0 {
                (CAP, false)
            } else {
                ((mean_y / (1.0 - mean_y)).ln(), true)
            }
        }
        Family::Poisson => {
            if mean_y <= 0.0 {
                (-CAP, false)
            } else {
                (mean_y.ln(), true)
            }
        }
        Family::Gamma { .. } => (mean_y.ln(), true),
    };
    let beta = CoefficientVector::new(intercept, vec![0.0; data.d()]);
    let risk = glm::empirical_risk(family, &beta, data)?;
    let (grad0, _) = glm::risk_gradient(family, &beta, data)?;
    Ok(FitResult {
        beta,
        lambda: 0.0,
        objective: risk,
        risk,
        penalty: 0.0,
        iterations: 0,
        converged,
        kkt_residual: grad0.abs(),
    })
}
