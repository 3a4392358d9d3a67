//! Complexity selection over a grid of constraint radii.
//!
//! A grid of radii `C_1 = 0 < ... < C_m = g(unpenalized)` defines a nested
//! family of models. Each criterion scores the constrained optimum at every
//! radius and picks the smallest index attaining the minimal score:
//!
//! * `select_panic`: empirical risk plus `kappa * C_k * sqrt(log n / n)`.
//! * `select_modified_bic`: empirical risk plus
//!   `(log n / n) * (kappa * df~_k + epsilon * C_k)`, where `df~` is the
//!   monotone envelope of the nonzero-coefficient counts.
//! * `select_cv`: mean held-out risk over seeded folds.
//! * `select_continuous`: the radius criterion minimized over a whole
//!   interval by coarse scan plus golden-section refinement.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::duality::{self, BracketHint, ConstrainedSolution, DualityConfig};
use crate::error::{Error, Result};
use crate::glm::{self, Dataset, Family};
use crate::penalty::{self, ConstraintRadius, PenaltySpec};
use crate::solver::{self, FitResult};

/// Strictly increasing radii. `build_grid` produces the canonical form
/// starting at 0 and anchored at the unpenalized penalty norm; `from_radii`
/// accepts any strictly increasing nonnegative sequence for custom scans.
#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    radii: Vec<f64>,
}

impl Grid {
    pub fn from_radii(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("grid must contain at least one radius".into()));
        }
        if radii[0] < 0.0 || radii.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidInput("grid radii must be finite and nonnegative".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("grid radii must be strictly increasing".into()));
        }
        Ok(Grid { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// `m` evenly spaced radii from 0 to the penalty norm of the unpenalized
/// fit. Fails with `unbounded-erm` when that fit does not converge and with
/// `degenerate-grid` when its penalty norm is zero.
pub fn build_grid(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    m: usize,
    config: &DualityConfig,
) -> Result<Grid> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("grid size must be >= 2, got {m}")));
    }
    config.validate()?;
    let erm = solver::fit_erm(family, data, &config.solver)?;
    if !erm.converged {
        return Err(Error::UnboundedErm(format!(
            "unpenalized fit did not converge after {} iterations (kkt residual {:.3e})",
            erm.iterations, erm.kkt_residual
        )));
    }
    let anchor = penalty::penalty_value(spec, &erm.beta.slopes);
    if anchor <= 0.0 {
        return Err(Error::DegenerateGrid(
            "unpenalized fit has zero penalty norm; the grid would collapse to {0}".into(),
        ));
    }
    let scale = 1.0 / (m - 1) as f64;
    Grid::from_radii((0..m).map(|k| anchor * (k as f64 * scale)).collect())
}

/// Radius penalty `kappa * C_k * sqrt(log n / n)`, floored away from zero so
/// it stays strictly positive at `C = 0` (the floor scales with `kappa`, so
/// rescaling `kappa` rescales the whole penalty exactly).
pub fn panic_penalty(c_k: f64, n: usize, kappa: f64) -> f64 {
    debug_assert!(n >= 2 && kappa >= 0.0 && c_k >= 0.0);
    let shape = ((n as f64).ln() / n as f64).sqrt();
    // kappa multiplies last so rescaling it rescales the penalty bit-exactly.
    kappa * ((c_k + 1e-12) * shape)
}

/// Zero test for slope coefficients. Proximal solutions (`lambda > 0`)
/// carry bit-exact zeros; gradient-only fits are compared against a
/// relative threshold because they carry rounding noise.
#[derive(Debug, Clone, Copy)]
pub enum ZeroRule {
    Exact,
    Relative { threshold: f64 },
}

impl ZeroRule {
    pub fn for_fit(fit: &FitResult) -> ZeroRule {
        if fit.lambda > 0.0 {
            ZeroRule::Exact
        } else {
            let max = fit.beta.slopes.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            ZeroRule::Relative {
                threshold: 1e-8 * max,
            }
        }
    }

    pub fn is_zero(&self, v: f64) -> bool {
        match self {
            ZeroRule::Exact => v == 0.0,
            ZeroRule::Relative { threshold } => v.abs() <= *threshold,
        }
    }
}

/// Number of nonzero slope coefficients (the intercept never counts).
pub fn df_hat(fit: &FitResult) -> usize {
    let rule = ZeroRule::for_fit(fit);
    fit.beta.slopes.iter().filter(|b| !rule.is_zero(**b)).count()
}

/// Monotone running envelope of a degrees-of-freedom sequence: each entry is
/// the raw count when it is at least every earlier count, otherwise the
/// carried envelope value. The output is non-decreasing.
pub fn df_tilde(df_hats: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(df_hats.len());
    let mut envelope = 0usize;
    for (i, &df) in df_hats.iter().enumerate() {
        envelope = if i == 0 { df } else { envelope.max(df) };
        out.push(envelope);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    Panic,
    ModifiedBic,
    Cv,
}

impl SelectionMethod {
    pub fn label(&self) -> &'static str {
        match self {
            SelectionMethod::Panic => "panic",
            SelectionMethod::ModifiedBic => "modified-bic",
            SelectionMethod::Cv => "cv",
        }
    }
}

/// One selection method with its hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriterionConfig {
    pub method: SelectionMethod,
    pub kappa: f64,
    /// Modified-BIC radius tilt.
    pub epsilon: f64,
    /// Cross-validation folds.
    pub folds: usize,
}

impl CriterionConfig {
    pub fn panic(kappa: f64) -> Self {
        CriterionConfig {
            method: SelectionMethod::Panic,
            kappa,
            epsilon: 1e-3,
            folds: 5,
        }
    }

    pub fn modified_bic(kappa: f64, epsilon: f64) -> Self {
        CriterionConfig {
            method: SelectionMethod::ModifiedBic,
            kappa,
            epsilon,
            folds: 5,
        }
    }

    pub fn cv(folds: usize) -> Self {
        CriterionConfig {
            method: SelectionMethod::Cv,
            kappa: 1.0,
            epsilon: 1e-3,
            folds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            SelectionMethod::Panic => {
                if !(self.kappa > 0.0 && self.kappa.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "panic requires kappa > 0, got {}",
                        self.kappa
                    )));
                }
            }
            SelectionMethod::ModifiedBic => {
                if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "modified-bic requires kappa >= 0, got {}",
                        self.kappa
                    )));
                }
                if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
                    return Err(Error::InvalidInput(format!(
                        "modified-bic requires epsilon > 0, got {}",
                        self.epsilon
                    )));
                }
            }
            SelectionMethod::Cv => {
                if self.folds < 2 {
                    return Err(Error::InvalidInput(format!(
                        "cross-validation requires folds >= 2, got {}",
                        self.folds
                    )));
                }
            }
        }
        Ok(())
    }

    /// Kappa as reported in tables (not meaningful for CV).
    pub fn reported_kappa(&self) -> Option<f64> {
        match self.method {
            SelectionMethod::Cv => None,
            _ => Some(self.kappa),
        }
    }
}

/// Per-radius diagnostics. Failed points keep their index and radius with
/// every other field empty.
#[derive(Debug, Clone, Serialize)]
pub struct GridPointRecord {
    pub index: usize,
    pub radius: f64,
    pub lambda: Option<f64>,
    /// Constrained optimal value (empirical risk).
    pub risk: Option<f64>,
    pub penalty_term: Option<f64>,
    pub criterion: Option<f64>,
    pub df_hat: Option<usize>,
    pub df_tilde: Option<usize>,
    pub cv_risk: Option<f64>,
    pub failed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionResult {
    pub method: String,
    /// 0-based position into `table` of the chosen radius; the smallest
    /// index among criterion ties.
    pub chosen_index: usize,
    pub chosen_radius: f64,
    pub fit: FitResult,
    pub table: Vec<GridPointRecord>,
    pub warnings: Vec<String>,
}

/// Constrained solutions along a radius grid, solved from the largest
/// radius down so each bisection reuses the previous multiplier as a lower
/// bracket and the previous coefficients as a warm start.
pub(crate) struct RadiusPath {
    pub solutions: Vec<Option<ConstrainedSolution>>,
    pub warnings: Vec<String>,
}

pub(crate) fn solve_radius_path(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    radii: &[f64],
    config: &DualityConfig,
    erm: Option<FitResult>,
) -> Result<RadiusPath> {
    let erm = match erm {
        Some(f) => f,
        None => solver::fit_erm(family, data, &config.solver)?,
    };
    let step_hint = solver::default_step(family, data, &erm.beta);
    let mut solutions: Vec<Option<ConstrainedSolution>> = vec![None; radii.len()];
    let mut warnings = Vec::new();
    let mut previous: Option<(f64, usize)> = None; // (lambda_star, index)

    for k in (0..radii.len()).rev() {
        let hint = match &previous {
            Some((lambda, idx)) => BracketHint {
                lambda_lo: *lambda,
                lambda_hi: None,
                warm_start: solutions[*idx].as_ref().map(|s| &s.fit.beta),
                erm: Some(&erm),
                step_hint,
            },
            None => BracketHint {
                erm: Some(&erm),
                step_hint,
                ..BracketHint::default()
            },
        };
        let radius = ConstraintRadius::new(radii[k])?;
        match duality::solve_constrained(family, data, spec, radius, config, Some(&hint)) {
            Ok(solution) => {
                previous = Some((solution.lambda_star, k));
                solutions[k] = Some(solution);
            }
            Err(e) => {
                warnings.push(format!("grid point {k} (C = {}) failed: {e}", radii[k]));
            }
        }
    }

    Ok(RadiusPath {
        solutions,
        warnings,
    })
}

/// Records with radius, multiplier, risk, and the df columns filled in; the
/// criterion columns are added per method.
pub(crate) fn base_records(radii: &[f64], path: &RadiusPath) -> Vec<GridPointRecord> {
    let mut records = Vec::with_capacity(radii.len());
    let mut envelope: Option<usize> = None;
    for (k, radius) in radii.iter().enumerate() {
        match &path.solutions[k] {
            Some(solution) => {
                let df = df_hat(&solution.fit);
                let env = match envelope {
                    None => df,
                    Some(e) => e.max(df),
                };
                envelope = Some(env);
                records.push(GridPointRecord {
                    index: k,
                    radius: *radius,
                    lambda: Some(solution.lambda_star),
                    risk: Some(solution.value),
                    penalty_term: None,
                    criterion: None,
                    df_hat: Some(df),
                    df_tilde: Some(env),
                    cv_risk: None,
                    failed: false,
                });
            }
            None => records.push(GridPointRecord {
                index: k,
                radius: *radius,
                lambda: None,
                risk: None,
                penalty_term: None,
                criterion: None,
                df_hat: None,
                df_tilde: None,
                cv_risk: None,
                failed: true,
            }),
        }
    }
    records
}

pub(crate) fn apply_panic(records: &mut [GridPointRecord], n: usize, kappa: f64) {
    for rec in records.iter_mut().filter(|r| !r.failed) {
        let p = panic_penalty(rec.radius, n, kappa);
        rec.penalty_term = Some(p);
        rec.criterion = Some(rec.risk.expect("present record has a risk") + p);
    }
}

pub(crate) fn apply_modified_bic(records: &mut [GridPointRecord], n: usize, kappa: f64, epsilon: f64) {
    let factor = (n as f64).ln() / n as f64;
    for rec in records.iter_mut().filter(|r| !r.failed) {
        let df = rec.df_tilde.expect("present record has df") as f64;
        let p = factor * (kappa * df + epsilon * rec.radius);
        rec.penalty_term = Some(p);
        rec.criterion = Some(rec.risk.expect("present record has a risk") + p);
    }
}

/// Smallest index attaining the minimal criterion value (strict-less scan,
/// so exact ties resolve to the smallest index).
pub(crate) fn choose(records: &[GridPointRecord]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for rec in records {
        if let Some(value) = rec.criterion {
            if best.map_or(true, |(_, b)| value < b) {
                best = Some((rec.index, value));
            }
        }
    }
    best.map(|(i, _)| i)
}

fn validate_selection_inputs(data: &Dataset, grid: &Grid, config: &DualityConfig) -> Result<()> {
    config.validate()?;
    if data.n() < 2 {
        return Err(Error::InvalidInput(
            "selection needs at least two observations".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("selection needs a nonempty grid".into()));
    }
    Ok(())
}

fn assemble(
    method: &str,
    records: Vec<GridPointRecord>,
    path: RadiusPath,
    chosen: usize,
) -> Result<SelectionResult> {
    let fit = path.solutions[chosen]
        .as_ref()
        .map(|s| s.fit.clone())
        .ok_or_else(|| Error::AllGridPointsFailed("chosen grid point has no solution".into()))?;
    Ok(SelectionResult {
        method: method.to_string(),
        chosen_index: chosen,
        chosen_radius: records[chosen].radius,
        fit,
        table: records,
        warnings: path.warnings,
    })
}

/// PanIC selection: minimize `risk_k + kappa * C_k * sqrt(log n / n)`.
pub fn select_panic(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    grid: &Grid,
    kappa: f64,
    config: &DualityConfig,
) -> Result<SelectionResult> {
    validate_selection_inputs(data, grid, config)?;
    CriterionConfig::panic(kappa).validate()?;
    let path = solve_radius_path(family, data, spec, grid.radii(), config, None)?;
    let mut records = base_records(grid.radii(), &path);
    apply_panic(&mut records, data.n(), kappa);
    let chosen = choose(&records).ok_or_else(|| {
        Error::AllGridPointsFailed(format!("all {} grid points failed", grid.len()))
    })?;
    assemble("panic", records, path, chosen)
}

/// Modified-BIC selection: minimize
/// `risk_k + (log n / n) * (kappa * df~_k + epsilon * C_k)`.
pub fn select_modified_bic(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    grid: &Grid,
    kappa: f64,
    epsilon: f64,
    config: &DualityConfig,
) -> Result<SelectionResult> {
    validate_selection_inputs(data, grid, config)?;
    CriterionConfig::modified_bic(kappa, epsilon).validate()?;
    let path = solve_radius_path(family, data, spec, grid.radii(), config, None)?;
    let mut records = base_records(grid.radii(), &path);
    apply_modified_bic(&mut records, data.n(), kappa, epsilon);
    let chosen = choose(&records).ok_or_else(|| {
        Error::AllGridPointsFailed(format!("all {} grid points failed", grid.len()))
    })?;
    assemble("modified-bic", records, path, chosen)
}

/// Deterministic fold assignment: indices shuffled once by a seeded
/// generator, then cut into near-equal contiguous blocks.
fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    idx.shuffle(&mut rng);
    (0..folds)
        .map(|f| idx[f * n / folds..(f + 1) * n / folds].to_vec())
        .collect()
}

pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A training fold a family cannot fit (single logistic class, all-zero
/// Poisson counts) triggers one reshuffle before giving up.
fn degenerate_training_fold(family: &Family, train: &Dataset) -> bool {
    match family {
        Family::Logistic => {
            let ones = train.y().iter().filter(|&&y| y == 1.0).count();
            ones == 0 || ones == train.n()
        }
        Family::Poisson => train.y().iter().all(|&y| y == 0.0),
        _ => false,
    }
}

/// Mean held-out risk per radius. `None` marks radii where any fold failed.
pub(crate) fn cv_validation_risks(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    radii: &[f64],
    folds: usize,
    seed: u64,
    config: &DualityConfig,
) -> Result<Vec<Option<f64>>> {
    match cv_attempt(family, data, spec, radii, folds, seed, config) {
        Ok(risks) => Ok(risks),
        Err(Error::InvalidInput(m)) => Err(Error::InvalidInput(m)),
        Err(first) => {
            let reseeded = mix_seed(seed, 0xF01D);
            cv_attempt(family, data, spec, radii, folds, reseeded, config).map_err(|second| {
                Error::CvDegenerateFold(format!(
                    "cross-validation failed twice: first ({first}), after reshuffle ({second})"
                ))
            })
        }
    }
}

fn cv_attempt(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    radii: &[f64],
    folds: usize,
    seed: u64,
    config: &DualityConfig,
) -> Result<Vec<Option<f64>>> {
    let n = data.n();
    let assignment = fold_assignment(n, folds, seed);
    let mut sums = vec![Some(0.0f64); radii.len()];

    for valid_idx in &assignment {
        let mut in_valid = vec![false; n];
        for &i in valid_idx {
            in_valid[i] = true;
        }
        let train_idx: Vec<usize> = (0..n).filter(|i| !in_valid[*i]).collect();
        let train = data.subset(&train_idx)?;
        let valid = data.subset(valid_idx)?;
        if degenerate_training_fold(family, &train) {
            return Err(Error::CvDegenerateFold(
                "a training fold contains a single response class".into(),
            ));
        }
        let path = solve_radius_path(family, &train, spec, radii, config, None)?;
        for (k, slot) in sums.iter_mut().enumerate() {
            let held_out = path.solutions[k].as_ref().and_then(|solution| {
                glm::empirical_risk(family, &solution.fit.beta, &valid).ok()
            });
            match (slot.as_mut(), held_out) {
                (Some(acc), Some(risk)) => *acc += risk,
                _ => *slot = None,
            }
        }
    }

    Ok(sums
        .into_iter()
        .map(|s| s.map(|total| total / folds as f64))
        .collect())
}

/// K-fold cross-validation over the radius grid. The winning radius is
/// refit on the full data.
pub fn select_cv(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    grid: &Grid,
    folds: usize,
    seed: u64,
    config: &DualityConfig,
) -> Result<SelectionResult> {
    validate_selection_inputs(data, grid, config)?;
    CriterionConfig::cv(folds).validate()?;
    if data.n() < folds {
        return Err(Error::InvalidInput(format!(
            "cannot split {} observations into {folds} folds",
            data.n()
        )));
    }
    let cv_risks = cv_validation_risks(family, data, spec, grid.radii(), folds, seed, config)?;
    let path = solve_radius_path(family, data, spec, grid.radii(), config, None)?;
    let mut records = base_records(grid.radii(), &path);
    for (rec, cv) in records.iter_mut().zip(&cv_risks) {
        rec.cv_risk = *cv;
        rec.criterion = *cv;
    }
    let chosen = records
        .iter()
        .filter_map(|r| r.cv_risk.map(|v| (r.index, v)))
        .fold(None::<(usize, f64)>, |best, (i, v)| match best {
            Some((_, b)) if v >= b => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::AllGridPointsFailed("no radius survived cross-validation".into())
        })?;

    let mut warnings = path.warnings.clone();
    let fit = match &path.solutions[chosen] {
        Some(solution) => solution.fit.clone(),
        None => {
            // The full-data solve failed at the chosen radius even though the
            // folds succeeded; retry it directly.
            warnings.push(format!(
                "re-solving chosen radius {} after a full-data path failure",
                grid.radii()[chosen]
            ));
            let radius = ConstraintRadius::new(grid.radii()[chosen])?;
            duality::solve_constrained(family, data, spec, radius, config, None)?.fit
        }
    };
    Ok(SelectionResult {
        method: "cv".to_string(),
        chosen_index: chosen,
        chosen_radius: grid.radii()[chosen],
        fit,
        table: records,
        warnings,
    })
}

const CONTINUOUS_COARSE_POINTS: usize = 50;

/// Minimize `risk(C) + kappa * C * sqrt(log n / n)` over the whole interval
/// `[a, b]`: a coarse scan brackets the best region, then golden-section
/// refinement shrinks it to `1e-3 * (b - a)`. Returns the smallest radius
/// among the best evaluations.
pub fn select_continuous(
    family: &Family,
    data: &Dataset,
    spec: &PenaltySpec,
    interval: (f64, f64),
    kappa: f64,
    config: &DualityConfig,
) -> Result<SelectionResult> {
    config.validate()?;
    CriterionConfig::panic(kappa).validate()?;
    let (a, b) = interval;
    if !(a >= 0.0 && b >= a && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "interval must satisfy 0 <= a <= b, got [{a}, {b}]"
        )));
    }
    if data.n() < 2 {
        return Err(Error::InvalidInput(
            "selection needs at least two observations".into(),
        ));
    }

    let erm = solver::fit_erm(family, data, &config.solver)?;
    let step_hint = solver::default_step(family, data, &erm.beta);
    let n = data.n();

    // Cache of evaluations keyed by radius bits; warm starts come from the
    // nearest solved radius.
    let mut cache: Vec<(f64, ConstrainedSolution)> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let evaluate = |c: f64,
                        cache: &mut Vec<(f64, ConstrainedSolution)>,
                        warnings: &mut Vec<String>|
     -> Option<f64> {
        if let Some((_, solution)) = cache.iter().find(|(r, _)| *r == c) {
            return Some(solution.value + panic_penalty(c, n, kappa));
        }
        let nearest = cache.iter().min_by(|(r1, _), (r2, _)| {
            (r1 - c).abs().partial_cmp(&(r2 - c).abs()).unwrap()
        });
        let hint = BracketHint {
            lambda_lo: nearest.map_or(0.0, |(r, s)| if *r > c { s.lambda_star } else { 0.0 }),
            lambda_hi: None,
            warm_start: nearest.map(|(_, s)| &s.fit.beta),
            erm: Some(&erm),
            step_hint,
        };
        let radius = ConstraintRadius::new(c).ok()?;
        match duality::solve_constrained(family, data, spec, radius, config, Some(&hint)) {
            Ok(solution) => {
                let value = solution.value + panic_penalty(c, n, kappa);
                cache.push((c, solution));
                Some(value)
            }
            Err(e) => {
                warnings.push(format!("radius {c} failed: {e}"));
                None
            }
        }
    };

    if a == b {
        evaluate(a, &mut cache, &mut warnings);
        return finish_continuous(a, kappa, n, cache, warnings);
    }

    // Coarse scan.
    let coarse: Vec<f64> = (0..CONTINUOUS_COARSE_POINTS)
        .map(|i| a + (b - a) * i as f64 / (CONTINUOUS_COARSE_POINTS - 1) as f64)
        .collect();
    let mut best: Option<(f64, f64)> = None; // (value, radius)
    for &c in &coarse {
        if let Some(value) = evaluate(c, &mut cache, &mut warnings) {
            let better = match best {
                None => true,
                Some((bv, bc)) => value < bv || (value == bv && c < bc),
            };
            if better {
                best = Some((value, c));
            }
        }
    }
    let (_, best_c) =
        best.ok_or_else(|| Error::AllGridPointsFailed("every coarse radius failed".into()))?;

    // Golden-section refinement on the bracket around the coarse winner.
    let spacing = (b - a) / (CONTINUOUS_COARSE_POINTS - 1) as f64;
    let mut lo = (best_c - spacing).max(a);
    let mut hi = (best_c + spacing).min(b);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let width_target = 1e-3 * (b - a);
    while hi - lo > width_target {
        let c1 = hi - phi * (hi - lo);
        let c2 = lo + phi * (hi - lo);
        let (Some(v1), Some(v2)) = (
            evaluate(c1, &mut cache, &mut warnings),
            evaluate(c2, &mut cache, &mut warnings),
        ) else {
            warnings.push("refinement stopped on a failed solve".into());
            break;
        };
        if v1 <= v2 {
            hi = c2;
        } else {
            lo = c1;
        }
    }

    finish_continuous(a, kappa, n, cache, warnings)
}

fn finish_continuous(
    fallback_radius: f64,
    kappa: f64,
    n: usize,
    mut cache: Vec<(f64, ConstrainedSolution)>,
    warnings: Vec<String>,
) -> Result<SelectionResult> {
    if cache.is_empty() {
        return Err(Error::AllGridPointsFailed(format!(
            "no radius could be evaluated near {fallback_radius}"
        )));
    }
    cache.sort_by(|(r1, _), (r2, _)| r1.total_cmp(r2));
    cache.dedup_by(|(r1, _), (r2, _)| r1 == r2);

    // Global winner among every evaluation; ties go to the smaller radius.
    let mut chosen = 0usize;
    let mut best_value = f64::INFINITY;
    let mut records = Vec::with_capacity(cache.len());
    let mut envelope: Option<usize> = None;
    for (k, (radius, solution)) in cache.iter().enumerate() {
        let p = panic_penalty(*radius, n, kappa);
        let value = solution.value + p;
        let df = df_hat(&solution.fit);
        let env = match envelope {
            None => df,
            Some(e) => e.max(df),
        };
        envelope = Some(env);
        records.push(GridPointRecord {
            index: k,
            radius: *radius,
            lambda: Some(solution.lambda_star),
            risk: Some(solution.value),
            penalty_term: Some(p),
            criterion: Some(value),
            df_hat: Some(df),
            df_tilde: Some(env),
            cv_risk: None,
            failed: false,
        });
        if value < best_value {
            best_value = value;
            chosen = k;
        }
    }
    let fit = cache[chosen].1.fit.clone();
    Ok(SelectionResult {
        method: "continuous".to_string(),
        chosen_index: chosen,
        chosen_radius: cache[chosen].0,
        fit,
        table: records,
        warnings,
    })
}
