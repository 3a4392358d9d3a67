//! Constrained-to-penalized correspondence.
//!
//! The penalized solutions trace out a path `L(lambda) = g(beta_lambda)`
//! which is continuous and non-increasing in `lambda` whenever the risk is
//! strictly convex, and whenever `g` strictly decreases the risk strictly
//! increases. Inverting that path by bisection solves the constrained
//! problem `min R_n subject to g(beta) <= C`: find the `lambda` whose
//! penalized solution lands on the boundary `g = C`, or return the
//! unpenalized fit when it is already inside the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{CoefficientVector, Dataset, Family};
use crate::penalty::{self, ConstraintRadius, PenaltySpec};
use crate::solver::{self, FitOptions, FitResult, SolverConfig};

/// One point of the map `lambda -> g(beta_lambda)`.
#[derive(Debug, Clone, Serialize)]
pub struct PathPoint {
    pub lambda: f64,
    /// `g(beta_lambda)`.
    pub penalty_level: f64,
    pub risk: f64,
    pub fit: FitResult,
}

/// Solution of the constrained problem at radius `c`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstrainedSolution {
    pub c: ConstraintRadius,
    /// Multiplier whose penalized solution coincides with the constrained
    /// one; 0 when the constraint is inactive.
    pub lambda_star: f64,
    pub fit: FitResult,
    /// True when the solution sits on the boundary `g(beta) = C`.
    pub active: bool,
    /// Empirical risk at the solution (the optimal value).
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualityConfig {
    pub solver: SolverConfig,
    /// Relative boundary tolerance: stop when `|g - C| <= tol_c * max(1, C)`.
    pub tol_c: f64,
    pub max_bisections: usize,
    /// Bracket expansion gives up past this multiplier.
    pub lambda_cap: f64,
}

impl Default for DualityConfig {
    fn default() -> Self {
        DualityConfig {
            solver: SolverConfig::default(),
            tol_c: 1e-4,
            max_bisections: 200,
            lambda_cap: 1e12,
        }
    }
}

impl DualityConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.tol_c > 0.0) || self.max_bisections == 0 || !(self.lambda_cap > 0.0) {
            return Err(Error::InvalidInput(
                "duality tolerances must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Reusable context for a chain of nearby constrained solves: a known lower
/// bracket endpoint, a warm start, a precomputed unpenalized fit, and a step
/// hint for the inner solver.
#[derive(Debug, Clone, Copy, Default)]
pub struct BracketHint<'a> {
    pub lambda_lo: f64,
    pub lambda_hi: Option<f64>,
    pub warm_start: Option<&'a CoefficientVector>,
    pub erm: Option<&'a FitResult>,
    pub step_hint: Option<f64>,
}

/// Solve the penalized problem at `lambda` and record the penalty level.
pub fn path_value(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    lambda: f64,
    config: &DualityConfig,
) -> Result<PathPoint> {
    config.validate()?;
    let fit = solver::fit_penalized(family, data, spec, lambda, &config.solver, None)?;
    if !fit.converged {
        return Err(Error::SolverFailure(format!(
            "penalized solve at lambda = {lambda} did not converge \
             (kkt residual {:.3e} after {} iterations)",
            fit.kkt_residual, fit.iterations
        )));
    }
    let penalty_level = penalty::penalty_value(spec, &fit.beta.slopes);
    Ok(PathPoint {
        lambda,
        penalty_level,
        risk: fit.risk,
        fit,
    })
}

/// Bracket endpoint on the dual path.
struct PathEval {
    lambda: f64,
    level: f64,
    fit: FitResult,
}

/// Solve `min R_n subject to g(beta) <= C` via bisection on the dual path.
///
/// `C >= g(unpenalized)` returns the unpenalized fit with `lambda = 0` and
/// an inactive constraint. `C = 0` pins the slopes to exact zero and fits
/// the intercept alone. Otherwise bisection brackets the boundary radius
/// between a lower multiplier (penalty level above `C`) and an expanded
/// upper one (below `C`), warm-starting every inner solve, and stops when
/// `|g - C| <= tol_c * max(1, C)` or the bracket collapses. On a flat
/// stretch of the path the smallest in-tolerance multiplier evaluated is
/// returned, so the output is deterministic.
pub fn solve_constrained(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    c: ConstraintRadius,
    config: &DualityConfig,
    hint: Option<&BracketHint<'_>>,
) -> Result<ConstrainedSolution> {
    config.validate()?;
    spec.validate()?;
    let target = c.value();

    if target == 0.0 {
        return intercept_only_solution(family, data, spec, c);
    }

    let default_hint = BracketHint::default();
    let hint = hint.unwrap_or(&default_hint);

    let erm_owned;
    let erm = match hint.erm {
        Some(f) => f,
        None => {
            erm_owned = solver::fit_erm(family, data, &config.solver)?;
            &erm_owned
        }
    };
    let erm_level = penalty::penalty_value(spec, &erm.beta.slopes);

    if erm_level <= target {
        if !erm.converged {
            // Cannot tell whether the constraint binds: the unpenalized
            // problem is ill-posed and its iterate is inside the ball.
            return Err(Error::SolverFailure(
                "unpenalized fit did not converge and its iterate lies inside \
                 the constraint; cannot classify the constraint as active"
                    .into(),
            ));
        }
        let mut fit = erm.clone();
        fit.lambda = 0.0;
        fit.penalty = erm_level;
        fit.objective = fit.risk;
        return Ok(ConstrainedSolution {
            c,
            lambda_star: 0.0,
            value: fit.risk,
            fit,
            active: false,
        });
    }

    let tol = config.tol_c * target.max(1.0);
    let solve_at = |lambda: f64, warm: &CoefficientVector| -> Result<PathEval> {
        let fit = solver::fit_penalized_with(
            family,
            data,
            spec,
            lambda,
            &config.solver,
            FitOptions {
                warm_start: Some(warm),
                step_hint: hint.step_hint,
            },
        )?;
        if !fit.converged {
            return Err(Error::SolverFailure(format!(
                "penalized solve at lambda = {lambda} did not converge during bisection"
            )));
        }
        let level = penalty::penalty_value(spec, &fit.beta.slopes);
        Ok(PathEval { lambda, level, fit })
    };

    // Smallest in-tolerance multiplier seen so far.
    let mut best: Option<PathEval> = None;
    let note = |eval: &PathEval, best: &mut Option<PathEval>| -> bool {
        if (eval.level - target).abs() <= tol {
            if best.as_ref().map_or(true, |b| eval.lambda < b.lambda) {
                *best = Some(PathEval {
                    lambda: eval.lambda,
                    level: eval.level,
                    fit: eval.fit.clone(),
                });
            }
            true
        } else {
            false
        }
    };

    // Lower endpoint: lambda = 0 is the unpenalized fit, above C here.
    let mut lo = PathEval {
        lambda: 0.0,
        level: erm_level,
        fit: erm.clone(),
    };
    let mut hi: Option<PathEval> = None;

    if hint.lambda_lo > 0.0 {
        let warm = hint.warm_start.unwrap_or(&erm.beta);
        let eval = solve_at(hint.lambda_lo, warm)?;
        if note(&eval, &mut best) {
            return Ok(finish(c, best.unwrap()));
        }
        if eval.level > target {
            lo = eval;
        } else {
            hi = Some(eval);
        }
    }

    // Expand the upper endpoint until the penalty level drops below C.
    let mut hi = match hi {
        Some(e) => e,
        None => {
            let mut lambda = hint
                .lambda_hi
                .filter(|h| *h > lo.lambda)
                .unwrap_or_else(|| if lo.lambda > 0.0 { 2.0 * lo.lambda } else { 1.0 });
            loop {
                let eval = solve_at(lambda, &lo.fit.beta)?;
                if note(&eval, &mut best) {
                    return Ok(finish(c, best.unwrap()));
                }
                if eval.level < target {
                    break eval;
                }
                lambda = 2.0 * eval.lambda;
                lo = eval;
                if lambda > config.lambda_cap {
                    return Err(Error::PathInversionFailed {
                        c: target,
                        lambda_cap: config.lambda_cap,
                    });
                }
            }
        }
    };

    let width_floor = 1e-12 * hi.lambda;
    for _ in 0..config.max_bisections {
        if hi.lambda - lo.lambda <= width_floor {
            break;
        }
        let mid = 0.5 * (lo.lambda + hi.lambda);
        // Warm start from the endpoint whose penalty level is closer to the
        // boundary.
        let warm = if (lo.level - target).abs() <= (hi.level - target).abs() {
            &lo.fit.beta
        } else {
            &hi.fit.beta
        };
        let eval = solve_at(mid, warm)?;
        if note(&eval, &mut best) {
            break;
        }
        if eval.level < target {
            hi = eval;
        } else {
            lo = eval;
        }
    }

    if let Some(found) = best {
        return Ok(finish(c, found));
    }
    // Bracket collapsed without hitting the tolerance (possible only when
    // the path jumps, i.e. the risk is not strictly convex). Return the
    // endpoint whose penalty level is closer to the boundary.
    let closest = if (lo.level - target).abs() <= (hi.level - target).abs() {
        lo
    } else {
        hi
    };
    Ok(finish(c, closest))
}

fn finish(c: ConstraintRadius, eval: PathEval) -> ConstrainedSolution {
    ConstrainedSolution {
        c,
        lambda_star: eval.lambda,
        value: eval.fit.risk,
        active: true,
        fit: FitResult {
            penalty: eval.level,
            ..eval.fit
        },
    }
}

/// `C = 0`: slopes pinned to exact zero, intercept fitted alone. The
/// reported multiplier is the smallest lambda that keeps every slope at
/// zero, read off the gradient at the intercept-only optimum.
fn intercept_only_solution(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    c: ConstraintRadius,
) -> Result<ConstrainedSolution> {
    let mut fit = solver::intercept_only_fit(family, data)?;
    let (_, grad) = crate::glm::risk_gradient(family, &fit.beta, data)?;
    let max_abs = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    let lambda_star = match spec {
        PenaltySpec::L1 => max_abs,
        PenaltySpec::L2 => grad.iter().map(|g| g * g).sum::<f64>().sqrt(),
        PenaltySpec::ElasticNet { alpha } => max_abs / alpha,
    };
    fit.lambda = lambda_star;
    fit.penalty = 0.0;
    fit.objective = fit.risk;
    Ok(ConstrainedSolution {
        c,
        lambda_star,
        value: fit.risk,
        active: true,
        fit,
    })
}
