//! Regularizers `g(beta)` over the slope vector: the L1 norm, the L2 norm
//! (the norm itself, not its square), and the elastic-net combination
//! `alpha*||beta||_1 + (1-alpha)*||beta||_2^2`. The intercept is never part
//! of `g`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltySpec {
    L1,
    L2,
    ElasticNet { alpha: f64 },
}

impl PenaltySpec {
    /// Elastic net with mixing weight `alpha` strictly inside (0, 1).
    pub fn elastic_net(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!(
                "elastic-net alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(PenaltySpec::ElasticNet { alpha })
    }

    pub fn validate(&self) -> Result<()> {
        if let PenaltySpec::ElasticNet { alpha } = self {
            if !(*alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "elastic-net alpha must lie in (0, 1), got {alpha}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            PenaltySpec::L1 => "l1",
            PenaltySpec::L2 => "l2",
            PenaltySpec::ElasticNet { .. } => "elastic-net",
        }
    }

    /// Does this penalty produce exact zeros (an L1 component)?
    pub fn sparsity_inducing(&self) -> bool {
        !matches!(self, PenaltySpec::L2)
    }
}

/// Nonnegative constraint radius `C` for the ball `g(beta) <= C`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ConstraintRadius(f64);

impl ConstraintRadius {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "constraint radius must be a nonnegative real, got {c}"
            )));
        }
        Ok(ConstraintRadius(c))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|b| b.abs()).sum()
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|b| b * b).sum::<f64>().sqrt()
}

/// `g(beta)` for the given penalty.
pub fn penalty_value(spec: &PenaltySpec, beta_slopes: &[f64]) -> f64 {
    match spec {
        PenaltySpec::L1 => l1_norm(beta_slopes),
        PenaltySpec::L2 => l2_norm(beta_slopes),
        PenaltySpec::ElasticNet { alpha } => {
            let l2 = beta_slopes.iter().map(|b| b * b).sum::<f64>();
            alpha * l1_norm(beta_slopes) + (1.0 - alpha) * l2
        }
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Proximal operator `argmin_z ||z - beta||^2 / (2 step) + lambda g(z)`.
///
/// Closed forms: coordinate-wise soft thresholding for L1; block soft
/// thresholding for the L2 norm; soft-threshold by `step*lambda*alpha` then
/// scale by `1 / (1 + 2 step lambda (1 - alpha))` for the elastic net.
pub fn prox(spec: &PenaltySpec, lambda: f64, step: f64, beta_slopes: &[f64]) -> Vec<f64> {
    debug_assert!(lambda >= 0.0 && step > 0.0);
    let t = step * lambda;
    if t == 0.0 {
        return beta_slopes.to_vec();
    }
    match spec {
        PenaltySpec::L1 => beta_slopes.iter().map(|&b| soft_threshold(b, t)).collect(),
        PenaltySpec::L2 => {
            let norm = l2_norm(beta_slopes);
            if norm <= t {
                vec![0.0; beta_slopes.len()]
            } else {
                let scale = 1.0 - t / norm;
                beta_slopes.iter().map(|&b| scale * b).collect()
            }
        }
        PenaltySpec::ElasticNet { alpha } => {
            let shrink = 1.0 / (1.0 + 2.0 * t * (1.0 - alpha));
            beta_slopes
                .iter()
                .map(|&b| soft_threshold(b, t * alpha) * shrink)
                .collect()
        }
    }
}

/// Membership test for the ball of radius `c`, with slack `tol`.
pub fn within_ball(spec: &PenaltySpec, c: ConstraintRadius, beta_slopes: &[f64], tol: f64) -> bool {
    penalty_value(spec, beta_slopes) <= c.value() + tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn penalty_value_examples() {
        assert_eq!(penalty_value(&PenaltySpec::L1, &[1.0, -2.0, 0.0]), 3.0);
        assert_eq!(penalty_value(&PenaltySpec::L2, &[3.0, 4.0]), 5.0);
        let en = PenaltySpec::elastic_net(0.5).unwrap();
        assert_eq!(penalty_value(&en, &[2.0, 0.0]), 3.0);
    }

    #[test]
    fn prox_examples() {
        assert_eq!(
            prox(&PenaltySpec::L1, 1.0, 1.0, &[3.0, -0.5]),
            vec![2.0, 0.0]
        );
        let beta = [0.7, -1.3, 0.2];
        for spec in [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.3).unwrap(),
        ] {
            assert_eq!(prox(&spec, 0.0, 0.5, &beta), beta.to_vec());
        }
        assert_eq!(prox(&PenaltySpec::L2, 1.0, 1.0, &[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn within_ball_examples() {
        let beta = [1.0, -2.0, 0.0];
        let c = |v| ConstraintRadius::new(v).unwrap();
        assert!(within_ball(&PenaltySpec::L1, c(3.0), &beta, 0.0));
        assert!(!within_ball(&PenaltySpec::L1, c(2.999), &beta, 0.0));
        for spec in [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.5).unwrap(),
        ] {
            assert!(within_ball(&spec, c(0.0), &[0.0, 0.0], 0.0));
        }
    }

    #[test]
    fn penalty_is_nonnegative_and_zero_only_at_origin() {
        let mut rng = StdRng::seed_from_u64(3);
        let specs = [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.25).unwrap(),
        ];
        for _ in 0..200 {
            let beta: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            for spec in &specs {
                let g = penalty_value(spec, &beta);
                assert!(g >= 0.0);
                if beta.iter().any(|&b| b != 0.0) {
                    assert!(g > 0.0);
                }
                assert_eq!(penalty_value(spec, &[0.0; 4]), 0.0);
            }
        }
    }

    #[test]
    fn penalty_is_convex() {
        let mut rng = StdRng::seed_from_u64(5);
        let specs = [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.6).unwrap(),
        ];
        for _ in 0..500 {
            let a: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let t: f64 = rng.gen();
            let mix: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| t * x + (1.0 - t) * y)
                .collect();
            for spec in &specs {
                let lhs = penalty_value(spec, &mix);
                let rhs = t * penalty_value(spec, &a) + (1.0 - t) * penalty_value(spec, &b);
                assert!(lhs <= rhs + 1e-12, "{lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn prox_output_beats_random_perturbations() {
        let mut rng = StdRng::seed_from_u64(9);
        let specs = [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.4).unwrap(),
        ];
        for spec in &specs {
            let beta: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * 4.0 - 2.0).collect();
            let (lambda, step) = (0.8, 0.6);
            let z = prox(spec, lambda, step, &beta);
            let objective = |v: &[f64]| {
                let dist: f64 = v.iter().zip(&beta).map(|(a, b)| (a - b) * (a - b)).sum();
                dist / (2.0 * step) + lambda * penalty_value(spec, v)
            };
            let best = objective(&z);
            for _ in 0..1000 {
                let perturbed: Vec<f64> = z
                    .iter()
                    .map(|&v| v + (rng.gen::<f64>() - 0.5) * 0.2)
                    .collect();
                assert!(best <= objective(&perturbed) + 1e-12);
            }
        }
    }

    #[test]
    fn balls_are_nested() {
        let mut rng = StdRng::seed_from_u64(17);
        let specs = [
            PenaltySpec::L1,
            PenaltySpec::L2,
            PenaltySpec::elastic_net(0.7).unwrap(),
        ];
        for _ in 0..200 {
            let beta: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let c1: f64 = rng.gen::<f64>() * 2.0;
            let c2 = c1 + rng.gen::<f64>();
            for spec in &specs {
                let small = ConstraintRadius::new(c1).unwrap();
                let large = ConstraintRadius::new(c2).unwrap();
                if within_ball(spec, small, &beta, 0.0) {
                    assert!(within_ball(spec, large, &beta, 0.0));
                }
            }
        }
    }

    #[test]
    fn elastic_net_prox_matches_numeric_minimization() {
        // 1-D golden-section oracle for the per-coordinate prox objective.
        let alpha = 0.35;
        let spec = PenaltySpec::elastic_net(alpha).unwrap();
        let golden = |beta: f64, lambda: f64, step: f64| -> f64 {
            let f = |z: f64| {
                (z - beta) * (z - beta) / (2.0 * step)
                    + lambda * (alpha * z.abs() + (1.0 - alpha) * z * z)
            };
            let (mut lo, mut hi) = (-10.0f64, 10.0f64);
            let phi = (5.0f64.sqrt() - 1.0) / 2.0;
            while hi - lo > 1e-12 {
                let a = hi - phi * (hi - lo);
                let b = lo + phi * (hi - lo);
                if f(a) < f(b) {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            0.5 * (lo + hi)
        };
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let beta = rng.gen::<f64>() * 6.0 - 3.0;
            let lambda = rng.gen::<f64>() * 2.0;
            let step = rng.gen::<f64>() * 1.5 + 0.1;
            let got = prox(&spec, lambda, step, &[beta])[0];
            let want = golden(beta, lambda, step);
            // The golden-section oracle locates a quadratic minimum only to
            // about sqrt(f64 epsilon / curvature) ~ 1e-8.
            assert_relative_eq!(got, want, epsilon = 1e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(PenaltySpec::elastic_net(0.0).is_err());
        assert!(PenaltySpec::elastic_net(1.0).is_err());
        assert!(ConstraintRadius::new(-0.1).is_err());
        assert!(ConstraintRadius::new(f64::NAN).is_err());
    }
}
