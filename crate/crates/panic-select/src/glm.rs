//! Loss functions, mean functions, empirical risk, and analytic gradients
//! for the four regression families: linear, logistic, Poisson, and Gamma.
//!
//! Every loss is the negative log-likelihood of the corresponding
//! distribution with no dropped constants, so reported risks are comparable
//! across fits. The logistic loss is evaluated through the log-sum-exp
//! identity and the Poisson factorial through the log-Gamma function, so all
//! losses stay finite whenever `|beta0 + beta.x| <= 700`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Largest linear predictor for which `exp` is still finite.
pub(crate) const EXP_LIMIT: f64 = 709.0;

/// Regression family. The Gamma family carries its fixed shape `nu > 0`;
/// the shape is user-supplied, never estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    Logistic,
    Poisson,
    Gamma { shape: f64 },
}

impl Family {
    /// Gamma family with the given shape, validated positive and finite.
    pub fn gamma(shape: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "gamma shape must be a positive real, got {shape}"
            )));
        }
        Ok(Family::Gamma { shape })
    }

    pub fn validate(&self) -> Result<()> {
        if let Family::Gamma { shape } = self {
            if !(*shape > 0.0 && shape.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "gamma shape must be a positive real, got {shape}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Logistic => "logistic",
            Family::Poisson => "poisson",
            Family::Gamma { .. } => "gamma",
        }
    }

    /// Is `y` a valid response for this family?
    pub fn valid_response(&self, y: f64) -> bool {
        match self {
            Family::Linear => y.is_finite(),
            Family::Logistic => y == 0.0 || y == 1.0,
            Family::Poisson => y.is_finite() && y >= 0.0 && y.fract() == 0.0,
            Family::Gamma { .. } => y.is_finite() && y > 0.0,
        }
    }
}

/// Immutable sample: an `n x d` covariate matrix (row major) and a length-`n`
/// response vector.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    n: usize,
    d: usize,
    /// Lazily built sufficient statistics for the quadratic (linear-family)
    /// risk; solvers evaluate hundreds of risks per dataset.
    quad: OnceLock<QuadStats>,
}

/// `mean y^2`, `X~'y / n`, and `X~'X~ / n` over the intercept-augmented
/// design `X~ = [1 X]`.
#[derive(Debug, Clone)]
pub(crate) struct QuadStats {
    pub(crate) yy: f64,
    pub(crate) xty: Vec<f64>,
    pub(crate) xtx: Vec<f64>,
}

impl QuadStats {
    /// `(risk, gradient)` of the mean squared residual at the augmented
    /// coefficient vector `(intercept, slopes)`.
    pub(crate) fn risk_and_gradient(&self, beta: &CoefficientVector) -> (f64, f64, Vec<f64>) {
        let p = self.xty.len();
        let d = p - 1;
        let mut qb = vec![0.0; p];
        for a in 0..p {
            let row = &self.xtx[a * p..(a + 1) * p];
            let mut acc = row[0] * beta.intercept;
            for (xab, b) in row[1..].iter().zip(&beta.slopes) {
                acc += xab * b;
            }
            qb[a] = acc;
        }
        let mut bq = beta.intercept * qb[0];
        let mut bt = beta.intercept * self.xty[0];
        for j in 0..d {
            bq += beta.slopes[j] * qb[j + 1];
            bt += beta.slopes[j] * self.xty[j + 1];
        }
        let risk = self.yy - 2.0 * bt + bq;
        let grad0 = 2.0 * (qb[0] - self.xty[0]);
        let grad: Vec<f64> = (0..d).map(|j| 2.0 * (qb[j + 1] - self.xty[j + 1])).collect();
        (risk, grad0, grad)
    }
}

impl Dataset {
    /// Build from a flat row-major covariate buffer.
    pub fn from_flat(x: Vec<f64>, y: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be >= 1".into()));
        }
        if y.is_empty() {
            return Err(Error::InvalidInput("n must be >= 1".into()));
        }
        if x.len() != y.len() * d {
            return Err(Error::InvalidInput(format!(
                "covariate buffer has {} entries, expected n*d = {}",
                x.len(),
                y.len() * d
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in data".into()));
        }
        let n = y.len();
        Ok(Dataset {
            x,
            y,
            n,
            d,
            quad: OnceLock::new(),
        })
    }

    /// Build from per-observation covariate rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("n must be >= 1".into()));
        }
        let d = rows[0].len();
        if let Some(i) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!(
                "row {i} has {} covariates, expected {d}",
                rows[i].len()
            )));
        }
        let mut x = Vec::with_capacity(rows.len() * d);
        for row in &rows {
            x.extend_from_slice(row);
        }
        Dataset::from_flat(x, y, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Check every response is valid for `family` (labels in {0,1} for
    /// logistic, nonnegative integers for Poisson, strictly positive for
    /// Gamma).
    pub fn validate_for(&self, family: &Family) -> Result<()> {
        family.validate()?;
        if let Some(i) = self.y.iter().position(|&y| !family.valid_response(y)) {
            return Err(Error::InvalidInput(format!(
                "response y[{i}] = {} is invalid for the {} family",
                self.y[i],
                family.name()
            )));
        }
        Ok(())
    }

    pub(crate) fn quad_stats(&self) -> &QuadStats {
        self.quad.get_or_init(|| {
            let p = self.d + 1;
            let mut yy = 0.0;
            let mut xty = vec![0.0; p];
            let mut xtx = vec![0.0; p * p];
            let mut aug = vec![1.0; p];
            for i in 0..self.n {
                aug[1..].copy_from_slice(self.row(i));
                let yi = self.y[i];
                yy += yi * yi;
                for a in 0..p {
                    xty[a] += aug[a] * yi;
                    let row = &mut xtx[a * p..(a + 1) * p];
                    let va = aug[a];
                    for (slot, vb) in row.iter_mut().zip(&aug) {
                        *slot += va * vb;
                    }
                }
            }
            let scale = 1.0 / self.n as f64;
            yy *= scale;
            for v in &mut xty {
                *v *= scale;
            }
            for v in &mut xtx {
                *v *= scale;
            }
            QuadStats { yy, xty, xtx }
        })
    }

    /// Owned subset of rows, in the order given by `idx`.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(idx.len() * self.d);
        let mut y = Vec::with_capacity(idx.len());
        for &i in idx {
            if i >= self.n {
                return Err(Error::InvalidInput(format!("row index {i} out of range")));
            }
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Dataset::from_flat(x, y, self.d)
    }
}

/// Intercept plus slope vector. The intercept is never penalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub intercept: f64,
    pub slopes: Vec<f64>,
}

impl CoefficientVector {
    pub fn zeros(d: usize) -> Self {
        CoefficientVector {
            intercept: 0.0,
            slopes: vec![0.0; d],
        }
    }

    pub fn new(intercept: f64, slopes: Vec<f64>) -> Self {
        CoefficientVector { intercept, slopes }
    }

    /// `beta0 + beta . x`
    pub fn linear_predictor(&self, x_row: &[f64]) -> f64 {
        self.intercept + dot(&self.slopes, x_row)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Numerically stable `log(1 + exp(t))`.
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Numerically stable inverse logit.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean function `h(x; beta0, beta)`: identity link for linear, inverse
/// logit for logistic, `exp` for Poisson and Gamma.
pub fn mean_value(family: &Family, beta: &CoefficientVector, x_row: &[f64]) -> Result<f64> {
    family.validate()?;
    check_dims(beta, x_row)?;
    let z = beta.linear_predictor(x_row);
    if !z.is_finite() {
        return Err(Error::Domain("non-finite linear predictor".into()));
    }
    match family {
        Family::Linear => Ok(z),
        Family::Logistic => Ok(sigmoid(z)),
        Family::Poisson | Family::Gamma { .. } => {
            if z > EXP_LIMIT {
                Err(Error::Domain(format!(
                    "exp overflow: linear predictor {z} exceeds {EXP_LIMIT}"
                )))
            } else {
                Ok(z.exp())
            }
        }
    }
}

fn check_dims(beta: &CoefficientVector, x_row: &[f64]) -> Result<()> {
    if beta.slopes.len() != x_row.len() {
        return Err(Error::InvalidInput(format!(
            "coefficient dimension {} does not match covariate dimension {}",
            beta.slopes.len(),
            x_row.len()
        )));
    }
    Ok(())
}

/// Per-observation loss split into a beta-dependent core and a beta-free
/// constant, plus the derivative of the core in the linear predictor.
///
/// linear:   core = (y - z)^2                                 const = 0
/// logistic: core = softplus(-z) + (1 - y) z                  const = 0
/// poisson:  core = exp(z) - y z                              const = lnGamma(y+1)
/// gamma:    core = nu z + nu y exp(-z)                       const = -(nu-1) ln y + lnGamma(nu) - nu ln nu
fn loss_core(family: &Family, z: f64, y: f64) -> Result<(f64, f64)> {
    match family {
        Family::Linear => {
            let r = z - y;
            Ok((r * r, 2.0 * r))
        }
        Family::Logistic => Ok((softplus(-z) + (1.0 - y) * z, sigmoid(z) - y)),
        Family::Poisson => {
            if z > EXP_LIMIT {
                return Err(Error::Domain(format!(
                    "exp overflow in poisson loss: linear predictor {z}"
                )));
            }
            let h = z.exp();
            Ok((h - y * z, h - y))
        }
        Family::Gamma { shape } => {
            // nu * y * exp(-z) computed in the log domain so a huge y cannot
            // push an intermediate past the overflow point.
            let t = if y > 0.0 {
                let e = shape.ln() + y.ln() - z;
                if e > EXP_LIMIT {
                    return Err(Error::Domain(format!(
                        "exp overflow in gamma loss: log-scale exponent {e}"
                    )));
                }
                e.exp()
            } else {
                0.0
            };
            Ok((shape * z + t, shape - t))
        }
    }
}

fn loss_constant(family: &Family, y: f64) -> f64 {
    match family {
        Family::Linear | Family::Logistic => 0.0,
        Family::Poisson => ln_gamma(y + 1.0),
        Family::Gamma { shape } => {
            -(shape - 1.0) * y.ln() + ln_gamma(*shape) - shape * shape.ln()
        }
    }
}

/// Negative log-likelihood of one observation, with all constants included.
pub fn pointwise_loss(
    family: &Family,
    beta: &CoefficientVector,
    x_row: &[f64],
    y: f64,
) -> Result<f64> {
    family.validate()?;
    check_dims(beta, x_row)?;
    if !family.valid_response(y) {
        return Err(Error::InvalidInput(format!(
            "response {y} is invalid for the {} family",
            family.name()
        )));
    }
    let z = beta.linear_predictor(x_row);
    let (core, _) = loss_core(family, z, y)?;
    let value = core + loss_constant(family, y);
    if !value.is_finite() {
        return Err(Error::Domain(format!("non-finite loss at z = {z}")));
    }
    Ok(value)
}

/// Mean of the beta-free loss constants over the sample. The solver adds
/// this once instead of re-evaluating log-Gamma terms in every pass.
pub(crate) fn risk_constant(family: &Family, data: &Dataset) -> f64 {
    data.y().iter().map(|&y| loss_constant(family, y)).sum::<f64>() / data.n() as f64
}

/// Mean of the beta-dependent loss cores; `risk_constant` completes it.
/// The linear family goes through the cached quadratic form.
pub(crate) fn core_risk(family: &Family, beta: &CoefficientVector, data: &Dataset) -> Result<f64> {
    if matches!(family, Family::Linear) {
        let (risk, _, _) = data.quad_stats().risk_and_gradient(beta);
        if !risk.is_finite() {
            return Err(Error::Domain("non-finite empirical risk".into()));
        }
        return Ok(risk);
    }
    let mut acc = 0.0;
    for i in 0..data.n() {
        let z = beta.linear_predictor(data.row(i));
        let (core, _) = loss_core(family, z, data.y()[i])?;
        acc += core;
    }
    let value = acc / data.n() as f64;
    if !value.is_finite() {
        return Err(Error::Domain("non-finite empirical risk".into()));
    }
    Ok(value)
}

/// Fused core risk and gradient in a single pass over the data.
pub(crate) fn core_risk_and_gradient(
    family: &Family,
    beta: &CoefficientVector,
    data: &Dataset,
) -> Result<(f64, f64, Vec<f64>)> {
    if matches!(family, Family::Linear) {
        let (risk, g0, g) = data.quad_stats().risk_and_gradient(beta);
        if !risk.is_finite() || !g0.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite risk or gradient".into()));
        }
        return Ok((risk, g0, g));
    }
    let n = data.n();
    let d = data.d();
    let mut risk = 0.0;
    let mut g0 = 0.0;
    let mut g = vec![0.0; d];
    for i in 0..n {
        let row = data.row(i);
        let z = beta.linear_predictor(row);
        let (core, dldz) = loss_core(family, z, data.y()[i])?;
        risk += core;
        g0 += dldz;
        for (gj, xj) in g.iter_mut().zip(row) {
            *gj += dldz * xj;
        }
    }
    let scale = 1.0 / n as f64;
    risk *= scale;
    g0 *= scale;
    for gj in &mut g {
        *gj *= scale;
    }
    if !risk.is_finite() || !g0.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite risk or gradient".into()));
    }
    Ok((risk, g0, g))
}

/// Empirical risk `R_n = (1/n) sum_i loss(x_i, y_i; beta)`.
pub fn empirical_risk(family: &Family, beta: &CoefficientVector, data: &Dataset) -> Result<f64> {
    data.validate_for(family)?;
    if beta.slopes.len() != data.d() {
        return Err(Error::InvalidInput(format!(
            "coefficient dimension {} does not match data dimension {}",
            beta.slopes.len(),
            data.d()
        )));
    }
    Ok(core_risk(family, beta, data)? + risk_constant(family, data))
}

/// Exact gradient of the empirical risk: `(d/d beta0, d/d beta)`. The
/// intercept component is the slope expression with the covariate entry 1.
pub fn risk_gradient(
    family: &Family,
    beta: &CoefficientVector,
    data: &Dataset,
) -> Result<(f64, Vec<f64>)> {
    data.validate_for(family)?;
    if beta.slopes.len() != data.d() {
        return Err(Error::InvalidInput(format!(
            "coefficient dimension {} does not match data dimension {}",
            beta.slopes.len(),
            data.d()
        )));
    }
    let (_, g0, g) = core_risk_and_gradient(family, beta, data)?;
    Ok((g0, g))
}
