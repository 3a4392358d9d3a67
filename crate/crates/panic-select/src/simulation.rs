//! Synthetic regression problems, per-replication metrics, and Monte Carlo
//! aggregation.
//!
//! A design draws i.i.d. standard Gaussian covariates, a sparse true
//! coefficient vector (Gaussian active block, exact trailing zeros), and
//! family-specific responses with no true intercept. Every replication is a
//! pure function of `(design, rep_index)`, carried by a per-replication
//! counter stream of a seeded generator, so studies reproduce exactly no
//! matter how the replications are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma as GammaDistribution, Poisson as PoissonDistribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duality::{self, DualityConfig};
use crate::error::{Error, Result};
use crate::glm::{Dataset, Family};
use crate::penalty::{self, ConstraintRadius, PenaltySpec};
use crate::selection::{
    self, apply_modified_bic, apply_panic, base_records, choose, mix_seed, CriterionConfig,
    SelectionMethod, ZeroRule,
};
use crate::solver::{self, FitResult};

/// One simulation cell: a family, problem size, noise level, and grid size,
/// replicated `reps` times from `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimDesign {
    pub family: Family,
    pub n: usize,
    /// Covariate dimension.
    pub d: usize,
    /// Number of active (nonzero) true coefficients.
    pub s: usize,
    /// Gaussian noise level; required for the linear family, absent
    /// otherwise.
    pub sigma: Option<f64>,
    pub reps: usize,
    pub seed: u64,
    /// Radius grid size.
    pub m: usize,
    pub penalty: PenaltySpec,
}

impl SimDesign {
    pub fn linear(n: usize, sigma: f64, reps: usize, seed: u64) -> Self {
        SimDesign {
            family: Family::Linear,
            n,
            d: 20,
            s: 10,
            sigma: Some(sigma),
            reps,
            seed,
            m: 100,
            penalty: PenaltySpec::L1,
        }
    }

    pub fn logistic(n: usize, reps: usize, seed: u64) -> Self {
        SimDesign {
            family: Family::Logistic,
            n,
            d: 20,
            s: 10,
            sigma: None,
            reps,
            seed,
            m: 100,
            penalty: PenaltySpec::L1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.penalty.validate()?;
        if self.d == 0 || self.s == 0 || self.s > self.d {
            return Err(Error::InvalidInput(format!(
                "need 1 <= s <= d, got s = {}, d = {}",
                self.s, self.d
            )));
        }
        if self.n < 2 {
            return Err(Error::InvalidInput("design needs n >= 2".into()));
        }
        if self.reps == 0 {
            return Err(Error::InvalidInput("design needs reps >= 1".into()));
        }
        if self.m < 2 {
            return Err(Error::InvalidInput("design needs grid size m >= 2".into()));
        }
        match (&self.family, self.sigma) {
            (Family::Linear, Some(s)) if s > 0.0 && s.is_finite() => Ok(()),
            (Family::Linear, _) => Err(Error::InvalidInput(
                "the linear family requires sigma > 0".into(),
            )),
            (_, None) => Ok(()),
            (_, Some(_)) => Err(Error::InvalidInput(
                "sigma only applies to the linear family".into(),
            )),
        }
    }
}

/// Sparse generating coefficients: the first `s` entries are Gaussian draws,
/// the rest are exactly zero.
#[derive(Debug, Clone, Serialize)]
pub struct TrueModel {
    pub beta_star: Vec<f64>,
}

impl TrueModel {
    pub fn l1_norm(&self) -> f64 {
        self.beta_star.iter().map(|b| b.abs()).sum()
    }
}

/// Metrics of one selected model against the generating truth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RepMetrics {
    /// `||chosen||_1 - ||truth||_1` (signed position relative to the truth).
    pub error: f64,
    pub abs_error: f64,
    /// Active coefficients in the chosen model.
    pub n_var: usize,
    /// Coefficients whose active/inactive status disagrees with the truth.
    pub n_wrong_var: usize,
}

/// Draw one problem. Deterministic in `(design, rep_index)`: the generator
/// is keyed by the design seed and jumps to an independent stream per
/// replication.
pub fn generate_problem(design: &SimDesign, rep_index: usize) -> Result<(Dataset, TrueModel)> {
    design.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(design.seed);
    rng.set_stream(rep_index as u64 + 1);

    let normal = rand_distr::StandardNormal;
    let (n, d, s) = (design.n, design.d, design.s);

    let mut x = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        x.push(normal.sample(&mut rng));
    }

    // Poisson/Gamma means are exp(beta.x); shrinking the active block keeps
    // the predictor in a safely sub-exponential range.
    let coef_scale = match design.family {
        Family::Poisson | Family::Gamma { .. } => 1.0 / (d as f64).sqrt(),
        _ => 1.0,
    };
    let mut beta_star = vec![0.0f64; d];
    for slot in beta_star.iter_mut().take(s) {
        let draw: f64 = normal.sample(&mut rng);
        *slot = coef_scale * draw;
    }

    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let z: f64 = (0..d).map(|j| beta_star[j] * x[i * d + j]).sum();
        let response = match design.family {
            Family::Linear => {
                let eps: f64 = normal.sample(&mut rng);
                z + design.sigma.expect("validated") * eps
            }
            Family::Logistic => {
                let p = 1.0 / (1.0 + (-z).exp());
                f64::from(rng.gen::<f64>() < p)
            }
            Family::Poisson => {
                let mean = z.exp();
                PoissonDistribution::new(mean)
                    .map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?
                    .sample(&mut rng)
            }
            Family::Gamma { shape } => {
                let mean = z.exp();
                GammaDistribution::new(shape, mean / shape)
                    .map_err(|e| Error::Domain(format!("gamma mean {mean}: {e}")))?
                    .sample(&mut rng)
            }
        };
        y.push(response);
    }

    Ok((Dataset::from_flat(x, y, d)?, TrueModel { beta_star }))
}

/// Compare a selected model against the truth. A chosen coefficient counts
/// as zero per `rule`; true coefficients are structural exact zeros.
pub fn compute_metrics(fit: &FitResult, truth: &TrueModel, rule: ZeroRule) -> RepMetrics {
    let chosen_norm: f64 = fit.beta.slopes.iter().map(|b| b.abs()).sum();
    let error = chosen_norm - truth.l1_norm();
    let mut n_var = 0usize;
    let mut n_wrong_var = 0usize;
    for (b, t) in fit.beta.slopes.iter().zip(&truth.beta_star) {
        let chosen_zero = rule.is_zero(*b);
        if !chosen_zero {
            n_var += 1;
        }
        let true_zero = *t == 0.0;
        if chosen_zero != true_zero {
            n_wrong_var += 1;
        }
    }
    RepMetrics {
        error,
        abs_error: error.abs(),
        n_var,
        n_wrong_var,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

/// Aggregated summary of one `(method, design)` cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub method: String,
    pub kappa: Option<f64>,
    pub family: String,
    pub n: usize,
    pub sigma: Option<f64>,
    pub error: Option<Stat>,
    pub abs_error: Option<Stat>,
    pub n_var: Option<Stat>,
    pub n_wrong_var: Option<Stat>,
    pub reps: usize,
    pub excluded: usize,
    /// True when fewer than two replications contributed, so the standard
    /// errors are reported as 0 by convention.
    pub se_degenerate: bool,
    /// More than 5% of replications failed.
    pub budget_exceeded: bool,
}

/// Outcome of one replication under one method.
#[derive(Debug, Clone, Serialize)]
pub struct RepRecord {
    pub method: String,
    pub kappa: Option<f64>,
    pub family: String,
    pub n: usize,
    pub sigma: Option<f64>,
    pub rep: usize,
    pub chosen_index: Option<usize>,
    pub chosen_radius: Option<f64>,
    pub error: Option<f64>,
    pub abs_error: Option<f64>,
    pub n_var: Option<usize>,
    pub n_wrong_var: Option<usize>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub cells: Vec<CellSummary>,
    pub replications: Vec<RepRecord>,
}

impl SimulationReport {
    /// Fixed-layout CSV: one row per (cell, metric), columns
    /// `method,family,n,sigma,kappa,metric,mean,se,reps,excluded`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,family,n,sigma,kappa,metric,mean,se,reps,excluded\n");
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for cell in &self.cells {
            let rows: [(&str, &Option<Stat>); 4] = [
                ("error", &cell.error),
                ("abs_error", &cell.abs_error),
                ("n_var", &cell.n_var),
                ("n_wrong_var", &cell.n_wrong_var),
            ];
            for (metric, stat) in rows {
                let (mean, se) = match stat {
                    Some(s) => (s.mean.to_string(), s.se.to_string()),
                    None => (String::new(), String::new()),
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    cell.method,
                    cell.family,
                    cell.n,
                    fmt_opt(cell.sigma),
                    fmt_opt(cell.kappa),
                    metric,
                    mean,
                    se,
                    cell.reps,
                    cell.excluded
                ));
            }
        }
        out
    }

    pub fn budget_violations(&self) -> Vec<&CellSummary> {
        self.cells.iter().filter(|c| c.budget_exceeded).collect()
    }

    pub fn find_cell(
        &self,
        method: &str,
        kappa: Option<f64>,
        n: usize,
        sigma: Option<f64>,
    ) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.kappa == kappa && c.n == n && c.sigma == sigma)
    }

    pub fn merge(mut self, mut other: SimulationReport) -> SimulationReport {
        self.cells.append(&mut other.cells);
        self.replications.append(&mut other.replications);
        sort_cells(&mut self.cells);
        sort_reps(&mut self.replications);
        self
    }
}

fn sort_cells(cells: &mut [CellSummary]) {
    cells.sort_by(|a, b| {
        (a.method.as_str(), opt_bits(a.kappa), a.family.as_str(), a.n, opt_bits(a.sigma)).cmp(&(
            b.method.as_str(),
            opt_bits(b.kappa),
            b.family.as_str(),
            b.n,
            opt_bits(b.sigma),
        ))
    });
}

fn sort_reps(reps: &mut [RepRecord]) {
    reps.sort_by(|a, b| {
        (a.method.as_str(), opt_bits(a.kappa), a.family.as_str(), a.n, opt_bits(a.sigma), a.rep)
            .cmp(&(
                b.method.as_str(),
                opt_bits(b.kappa),
                b.family.as_str(),
                b.n,
                opt_bits(b.sigma),
                b.rep,
            ))
    });
}

fn opt_bits(v: Option<f64>) -> u64 {
    v.map(|x| x.to_bits()).unwrap_or(0)
}

struct MethodRep {
    chosen_index: usize,
    chosen_radius: f64,
    metrics: RepMetrics,
    /// Wall-clock cost of this method as if run standalone (the shared
    /// radius path is attributed to every criterion method).
    seconds: f64,
}

type RepOutcome = Vec<std::result::Result<MethodRep, String>>;

/// Run every `(design, method)` cell: `reps` independent problems per
/// design, each solved once along the shared radius grid and then scored by
/// every requested method. Replications run in parallel; assembly orders
/// rows by `(method, n, sigma, rep)`, so the report does not depend on
/// scheduling.
///
/// For linear designs the modified-BIC weights are rescaled by the
/// estimated noise variance (see `run_rep`), so `kappa = 1` matches the
/// classical BIC trade-off at every noise level.
pub fn run_study(
    designs: &[SimDesign],
    methods: &[CriterionConfig],
    config: &DualityConfig,
    threads: usize,
) -> Result<SimulationReport> {
    if designs.is_empty() || methods.is_empty() {
        return Err(Error::InvalidInput(
            "the study needs at least one design and one method".into(),
        ));
    }
    for design in designs {
        design.validate()?;
        if methods
            .iter()
            .any(|m| m.method == SelectionMethod::Cv && design.n < m.folds)
        {
            return Err(Error::InvalidInput(format!(
                "design n = {} is smaller than the fold count",
                design.n
            )));
        }
    }
    for method in methods {
        method.validate()?;
    }
    config.validate()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;

    let tasks: Vec<(usize, usize)> = designs
        .iter()
        .enumerate()
        .flat_map(|(di, design)| (0..design.reps).map(move |rep| (di, rep)))
        .collect();

    let outcomes: Vec<RepOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(di, rep)| run_rep(&designs[di], rep, methods, config))
            .collect()
    });

    // Index of the first task of each design in the flat task list.
    let mut offsets = Vec::with_capacity(designs.len());
    let mut acc = 0usize;
    for design in designs {
        offsets.push(acc);
        acc += design.reps;
    }

    let mut cells = Vec::new();
    let mut replications = Vec::new();
    for (di, design) in designs.iter().enumerate() {
        for (mi, method) in methods.iter().enumerate() {
            let label = method.method.label().to_string();
            let kappa = method.reported_kappa();
            let mut included: Vec<RepMetrics> = Vec::new();
            let mut excluded = 0usize;
            let mut seconds = 0.0f64;
            for rep in 0..design.reps {
                let item = &outcomes[offsets[di] + rep][mi];
                let mut record = RepRecord {
                    method: label.clone(),
                    kappa,
                    family: design.family.name().to_string(),
                    n: design.n,
                    sigma: design.sigma,
                    rep,
                    chosen_index: None,
                    chosen_radius: None,
                    error: None,
                    abs_error: None,
                    n_var: None,
                    n_wrong_var: None,
                    failure: None,
                };
                match item {
                    Ok(mr) => {
                        record.chosen_index = Some(mr.chosen_index);
                        record.chosen_radius = Some(mr.chosen_radius);
                        record.error = Some(mr.metrics.error);
                        record.abs_error = Some(mr.metrics.abs_error);
                        record.n_var = Some(mr.metrics.n_var);
                        record.n_wrong_var = Some(mr.metrics.n_wrong_var);
                        seconds += mr.seconds;
                        included.push(mr.metrics);
                    }
                    Err(msg) => {
                        record.failure = Some(msg.clone());
                        excluded += 1;
                    }
                }
                replications.push(record);
            }
            let stat_of = |extract: &dyn Fn(&RepMetrics) -> f64| -> Option<Stat> {
                if included.is_empty() {
                    return None;
                }
                let values: Vec<f64> = included.iter().map(|m| extract(m)).collect();
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let se = if values.len() < 2 {
                    0.0
                } else {
                    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                        / (values.len() - 1) as f64;
                    (var / values.len() as f64).sqrt()
                };
                Some(Stat { mean, se })
            };
            // Wall-clock log only; reports stay a pure function of the seed.
            eprintln!(
                "timing: method={label} kappa={kappa:?} family={} n={} sigma={:?}: {seconds:.2}s over {} reps",
                design.family.name(),
                design.n,
                design.sigma,
                included.len(),
            );
            cells.push(CellSummary {
                method: label,
                kappa,
                family: design.family.name().to_string(),
                n: design.n,
                sigma: design.sigma,
                error: stat_of(&|m| m.error),
                abs_error: stat_of(&|m| m.abs_error),
                n_var: stat_of(&|m| m.n_var as f64),
                n_wrong_var: stat_of(&|m| m.n_wrong_var as f64),
                reps: design.reps,
                excluded,
                se_degenerate: included.len() < 2,
                budget_exceeded: excluded as f64 > 0.05 * design.reps as f64,
            });
        }
    }
    sort_cells(&mut cells);
    sort_reps(&mut replications);
    Ok(SimulationReport {
        cells,
        replications,
    })
}

fn run_rep(
    design: &SimDesign,
    rep: usize,
    methods: &[CriterionConfig],
    config: &DualityConfig,
) -> RepOutcome {
    let fail_all = |msg: String| -> RepOutcome {
        methods.iter().map(|_| Err(msg.clone())).collect()
    };

    let (data, truth) = match generate_problem(design, rep) {
        Ok(v) => v,
        Err(e) => return fail_all(e.to_string()),
    };
    let erm = match solver::fit_erm(&design.family, &data, &config.solver) {
        Ok(f) if f.converged => f,
        Ok(_) => return fail_all("unbounded-erm: unpenalized fit did not converge".into()),
        Err(e) => return fail_all(e.to_string()),
    };
    let erm_risk = erm.risk;
    let anchor = penalty::penalty_value(&design.penalty, &erm.beta.slopes);
    if anchor <= 0.0 {
        return fail_all("degenerate-grid: unpenalized fit has zero penalty norm".into());
    }
    let scale = 1.0 / (design.m - 1) as f64;
    let radii: Vec<f64> = (0..design.m).map(|k| anchor * (k as f64 * scale)).collect();

    let path_start = std::time::Instant::now();
    let path = match selection::solve_radius_path(
        &design.family,
        &data,
        &design.penalty,
        &radii,
        config,
        Some(erm),
    ) {
        Ok(p) => p,
        Err(e) => return fail_all(e.to_string()),
    };
    let path_seconds = path_start.elapsed().as_secs_f64();
    let base = base_records(&radii, &path);

    // The linear-family squared loss is the negative log-likelihood only up
    // to the noise scale, so a "BIC-like" criterion must weigh degrees of
    // freedom against risk on the deviance scale. Multiplying (kappa,
    // epsilon) by the estimated noise variance is equivalent to dividing the
    // risk by it, and reduces to the classical BIC trade-off. The other
    // families' losses are exact log-likelihoods and need no scale.
    let bic_scale = match design.family {
        Family::Linear if design.n > design.d + 1 => {
            erm_risk * design.n as f64 / (design.n - design.d - 1) as f64
        }
        _ => 1.0,
    };

    methods
        .iter()
        .map(|method| match method.method {
            SelectionMethod::Panic | SelectionMethod::ModifiedBic => {
                let mut records = base.clone();
                match method.method {
                    SelectionMethod::Panic => apply_panic(&mut records, design.n, method.kappa),
                    _ => apply_modified_bic(
                        &mut records,
                        design.n,
                        method.kappa * bic_scale,
                        method.epsilon * bic_scale,
                    ),
                }
                let chosen = choose(&records)
                    .ok_or_else(|| "all-grid-points-failed".to_string())?;
                let solution = path.solutions[chosen]
                    .as_ref()
                    .ok_or_else(|| "chosen grid point missing".to_string())?;
                let rule = ZeroRule::for_fit(&solution.fit);
                Ok(MethodRep {
                    chosen_index: chosen,
                    chosen_radius: radii[chosen],
                    metrics: compute_metrics(&solution.fit, &truth, rule),
                    seconds: path_seconds,
                })
            }
            SelectionMethod::Cv => {
                let cv_start = std::time::Instant::now();
                let cv_seed = mix_seed(design.seed, rep as u64 + 1);
                let risks = selection::cv_validation_risks(
                    &design.family,
                    &data,
                    &design.penalty,
                    &radii,
                    method.folds,
                    cv_seed,
                    config,
                )
                .map_err(|e| e.to_string())?;
                let chosen = risks
                    .iter()
                    .enumerate()
                    .filter_map(|(k, r)| r.map(|v| (k, v)))
                    .fold(None::<(usize, f64)>, |best, (k, v)| match best {
                        Some((_, b)) if v >= b => best,
                        _ => Some((k, v)),
                    })
                    .map(|(k, _)| k)
                    .ok_or_else(|| "no radius survived cross-validation".to_string())?;
                let fit = match &path.solutions[chosen] {
                    Some(solution) => solution.fit.clone(),
                    None => {
                        let radius = ConstraintRadius::new(radii[chosen])
                            .map_err(|e| e.to_string())?;
                        duality::solve_constrained(
                            &design.family,
                            &data,
                            &design.penalty,
                            radius,
                            config,
                            None,
                        )
                        .map_err(|e| e.to_string())?
                        .fit
                    }
                };
                let rule = ZeroRule::for_fit(&fit);
                Ok(MethodRep {
                    chosen_index: chosen,
                    chosen_radius: radii[chosen],
                    metrics: compute_metrics(&fit, &truth, rule),
                    seconds: cv_start.elapsed().as_secs_f64(),
                })
            }
        })
        .collect()
}
