//! Command-line surface: fit single models, select constraint radii on user
//! data, and run simulation studies.
//!
//! Exit codes partition failures: 0 success, 2 input or configuration, 3
//! numerical, 4 failure budget exceeded.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::duality::{self, ConstrainedSolution, DualityConfig};
use crate::error::{Error, Result};
use crate::glm::{Dataset, Family};
use crate::penalty::{ConstraintRadius, PenaltySpec};
use crate::report;
use crate::selection::{self, CriterionConfig, SelectionResult};
use crate::simulation::{self, SimDesign, SimulationReport};
use crate::solver::{self, FitResult, SolverConfig};

#[derive(Parser)]
#[command(
    name = "panic-select",
    version,
    about = "Consistent complexity selection for regularized GLM regressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model: penalized (--lambda) or constrained (--c).
    Fit(FitArgs),
    /// Select a constraint radius by an information criterion or CV.
    Select(SelectArgs),
    /// Run a Monte Carlo study and emit CSV/JSON reports.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Linear,
    Logistic,
    Poisson,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum PenaltyArg {
    L1,
    L2,
    ElasticNet,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Panic,
    ModifiedBic,
    Cv,
    /// Interval refinement over [0, unpenalized norm].
    Continuous,
}

#[derive(Args)]
struct DataArgs {
    /// Headered CSV with one response column; all other columns are
    /// numeric covariates.
    #[arg(long)]
    data: PathBuf,
    /// Response column name.
    #[arg(long, default_value = "y")]
    response: String,
    #[arg(long, value_enum, default_value_t = FamilyArg::Linear)]
    family: FamilyArg,
    /// Gamma shape parameter.
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[arg(long, value_enum, default_value_t = PenaltyArg::L1)]
    penalty: PenaltyArg,
    /// Elastic-net mixing weight.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Regularization constant for the penalized problem.
    #[arg(long, conflicts_with = "c", required_unless_present = "c")]
    lambda: Option<f64>,
    /// Constraint radius for the constrained problem.
    #[arg(long, required_unless_present = "lambda")]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Grid size.
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t =  0)]
    seed: u64,
    /// JSON result path; the per-radius table lands next to it as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML run configuration (see README). Flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset: the full linear and logistic study grid.
    #[arg(long)]
    paper_tables: bool,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, value_enum)]
    penalty: Option<PenaltyArg>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Gamma shape parameter.
    #[arg(long)]
    nu: Option<f64>,
    /// Comma-separated kappa list; adds one panic method per value.
    #[arg(long)]
    kappa_sweep: Option<String>,
    /// Output prefix: writes <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Select(args) => cmd_select(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn make_family(arg: FamilyArg, nu: f64) -> Result<Family> {
    match arg {
        FamilyArg::Linear => Ok(Family::Linear),
        FamilyArg::Logistic => Ok(Family::Logistic),
        FamilyArg::Poisson => Ok(Family::Poisson),
        FamilyArg::Gamma => Family::gamma(nu),
    }
}

fn make_penalty(arg: PenaltyArg, alpha: f64) -> Result<PenaltySpec> {
    match arg {
        PenaltyArg::L1 => Ok(PenaltySpec::L1),
        PenaltyArg::L2 => Ok(PenaltySpec::L2),
        PenaltyArg::ElasticNet => PenaltySpec::elastic_net(alpha),
    }
}

/// Read a headered CSV into a dataset. The response column is selected by
/// name; every other column must be numeric and becomes a covariate.
fn read_csv_dataset(path: &Path, response: &str) -> Result<(Dataset, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let response_idx = headers
        .iter()
        .position(|h| h == response)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "response column '{response}' not found; header has: {}",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })?;
    let names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != response_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows = Vec::new();
    let mut y = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record
            .position()
            .map(|p| p.line().to_string())
            .unwrap_or_else(|| "?".into());
        let mut row = Vec::with_capacity(names.len());
        for (i, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "row at line {line}, column '{}': cannot parse '{field}' as a number",
                    headers.get(i).unwrap_or("?")
                ))
            })?;
            if i == response_idx {
                y.push(value);
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    Ok((Dataset::from_rows(rows, y)?, names))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

#[derive(Serialize)]
struct PenalizedOutput<'a> {
    mode: &'static str,
    family: &'a Family,
    penalty: &'a PenaltySpec,
    fit: &'a FitResult,
}

#[derive(Serialize)]
struct ConstrainedOutput<'a> {
    mode: &'static str,
    family: &'a Family,
    penalty: &'a PenaltySpec,
    solution: &'a ConstrainedSolution,
}

fn cmd_fit(args: FitArgs) -> Result<i32> {
    let (data, _) = read_csv_dataset(&args.data.data, &args.data.response)?;
    let family = make_family(args.data.family, args.data.nu)?;
    let penalty = make_penalty(args.data.penalty, args.data.alpha)?;
    data.validate_for(&family)?;
    let config = DualityConfig::default();

    match (args.lambda, args.c) {
        (Some(lambda), None) => {
            let fit =
                solver::fit_penalized(&family, &data, &penalty, lambda, &config.solver, None)?;
            let json = report::to_json_string(&PenalizedOutput {
                mode: "penalized",
                family: &family,
                penalty: &penalty,
                fit: &fit,
            })?;
            write_output(&args.out, &json)?;
            if fit.converged {
                Ok(0)
            } else {
                eprintln!(
                    "error: solver-failure: fit did not converge after {} iterations \
                     (kkt residual {:.3e})",
                    fit.iterations, fit.kkt_residual
                );
                Ok(3)
            }
        }
        (None, Some(c)) => {
            let radius = ConstraintRadius::new(c)?;
            let solution =
                duality::solve_constrained(&family, &data, &penalty, radius, &config, None)?;
            let json = report::to_json_string(&ConstrainedOutput {
                mode: "constrained",
                family: &family,
                penalty: &penalty,
                solution: &solution,
            })?;
            write_output(&args.out, &json)?;
            Ok(0)
        }
        _ => Err(Error::InvalidInput(
            "exactly one of --lambda or --c is required".into(),
        )),
    }
}

#[derive(Serialize)]
struct SelectOutput<'a> {
    family: &'a Family,
    penalty: &'a PenaltySpec,
    grid_size: usize,
    seed: u64,
    result: &'a SelectionResult,
}

fn grid_table_csv(result: &SelectionResult) -> String {
    let mut out =
        String::from("index,radius,lambda,risk,penalty_term,criterion,df_hat,df_tilde,cv_risk,failed\n");
    let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let u = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for rec in &result.table {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            rec.index,
            rec.radius,
            f(rec.lambda),
            f(rec.risk),
            f(rec.penalty_term),
            f(rec.criterion),
            u(rec.df_hat),
            u(rec.df_tilde),
            f(rec.cv_risk),
            rec.failed
        ));
    }
    out
}

fn cmd_select(args: SelectArgs) -> Result<i32> {
    let (data, _) = read_csv_dataset(&args.data.data, &args.data.response)?;
    let family = make_family(args.data.family, args.data.nu)?;
    let penalty = make_penalty(args.data.penalty, args.data.alpha)?;
    data.validate_for(&family)?;
    let config = DualityConfig::default();
    let grid = selection::build_grid(&family, &data, &penalty, args.m, &config)?;

    let result = match args.method {
        MethodArg::Panic => {
            selection::select_panic(&family, &data, &penalty, &grid, args.kappa, &config)?
        }
        MethodArg::ModifiedBic => selection::select_modified_bic(
            &family,
            &data,
            &penalty,
            &grid,
            args.kappa,
            args.epsilon,
            &config,
        )?,
        MethodArg::Cv => selection::select_cv(
            &family,
            &data,
            &penalty,
            &grid,
            args.folds,
            args.seed,
            &config,
        )?,
        MethodArg::Continuous => {
            let anchor = *grid.radii().last().expect("grid is nonempty");
            selection::select_continuous(
                &family,
                &data,
                &penalty,
                (0.0, anchor),
                args.kappa,
                &config,
            )?
        }
    };
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }

    let json = report::to_json_string(&SelectOutput {
        family: &family,
        penalty: &penalty,
        grid_size: args.m,
        seed: args.seed,
        result: &result,
    })?;
    write_output(&args.out, &json)?;
    if let Some(out) = &args.out {
        let table_path = out.with_extension("csv");
        std::fs::write(&table_path, grid_table_csv(&result))?;
    }
    Ok(0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DesignSection {
    family: String,
    n: Vec<usize>,
    sigma: Vec<f64>,
    d: usize,
    s: usize,
    reps: usize,
    seed: u64,
    m: usize,
    nu: f64,
    penalty: String,
    alpha: f64,
}

impl Default for DesignSection {
    fn default() -> Self {
        DesignSection {
            family: "linear".into(),
            n: vec![500],
            sigma: vec![1.0],
            d: 20,
            s: 10,
            reps: 100,
            seed: 42,
            m: 100,
            nu: 1.0,
            penalty: "l1".into(),
            alpha: 0.5,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MethodSection {
    kind: String,
    kappa: Option<f64>,
    epsilon: Option<f64>,
    folds: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DualitySection {
    tol_c: f64,
    max_bisections: usize,
    lambda_cap: f64,
}

impl Default for DualitySection {
    fn default() -> Self {
        let d = DualityConfig::default();
        DualitySection {
            tol_c: d.tol_c,
            max_bisections: d.max_bisections,
            lambda_cap: d.lambda_cap,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct OutputSection {
    csv: String,
    json: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            csv: "simulation_report.csv".into(),
            json: "simulation_report.json".into(),
        }
    }
}

/// Declarative run configuration. Defaults mirror the library defaults, and
/// unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RunConfig {
    design: DesignSection,
    #[serde(rename = "method")]
    methods: Vec<MethodSection>,
    solver: SolverConfig,
    duality: DualitySection,
    output: OutputSection,
    threads: Option<usize>,
}

fn parse_family_name(name: &str, nu: f64) -> Result<Family> {
    match name {
        "linear" => Ok(Family::Linear),
        "logistic" => Ok(Family::Logistic),
        "poisson" => Ok(Family::Poisson),
        "gamma" => Family::gamma(nu),
        other => Err(Error::Config(format!("unknown family '{other}'"))),
    }
}

fn parse_penalty_name(name: &str, alpha: f64) -> Result<PenaltySpec> {
    match name {
        "l1" => Ok(PenaltySpec::L1),
        "l2" => Ok(PenaltySpec::L2),
        "elastic-net" => PenaltySpec::elastic_net(alpha),
        other => Err(Error::Config(format!("unknown penalty '{other}'"))),
    }
}

fn parse_method_section(section: &MethodSection) -> Result<CriterionConfig> {
    let mut method = match section.kind.as_str() {
        "panic" => CriterionConfig::panic(section.kappa.unwrap_or(1.0)),
        "modified-bic" => CriterionConfig::modified_bic(
            section.kappa.unwrap_or(1.0),
            section.epsilon.unwrap_or(1e-3),
        ),
        "cv" => CriterionConfig::cv(section.folds.unwrap_or(5)),
        other => return Err(Error::Config(format!("unknown method kind '{other}'"))),
    };
    if let Some(e) = section.epsilon {
        method.epsilon = e;
    }
    if let Some(f) = section.folds {
        method.folds = f;
    }
    method.validate()?;
    Ok(method)
}

/// One batch of designs sharing a method list.
struct StudyBatch {
    designs: Vec<SimDesign>,
    methods: Vec<CriterionConfig>,
}

fn config_batch(config: &RunConfig, args: &SimulateArgs) -> Result<StudyBatch> {
    let section = &config.design;
    let family_name = match args.family {
        Some(FamilyArg::Linear) => "linear".to_string(),
        Some(FamilyArg::Logistic) => "logistic".to_string(),
        Some(FamilyArg::Poisson) => "poisson".to_string(),
        Some(FamilyArg::Gamma) => "gamma".to_string(),
        None => section.family.clone(),
    };
    let family = parse_family_name(&family_name, args.nu.unwrap_or(section.nu))?;
    let penalty_name = match args.penalty {
        Some(PenaltyArg::L1) => "l1",
        Some(PenaltyArg::L2) => "l2",
        Some(PenaltyArg::ElasticNet) => "elastic-net",
        None => section.penalty.as_str(),
    };
    let penalty = parse_penalty_name(penalty_name, args.alpha.unwrap_or(section.alpha))?;
    let sigmas: Vec<Option<f64>> = if matches!(family, Family::Linear) {
        section.sigma.iter().map(|s| Some(*s)).collect()
    } else {
        vec![None]
    };
    let mut designs = Vec::new();
    for &n in &section.n {
        for &sigma in &sigmas {
            designs.push(SimDesign {
                family,
                n,
                d: section.d,
                s: section.s,
                sigma,
                reps: args.reps.unwrap_or(section.reps),
                seed: args.seed.unwrap_or(section.seed),
                m: args.m.unwrap_or(section.m),
                penalty,
            });
        }
    }
    let mut methods = Vec::new();
    for section in &config.methods {
        let mut method = parse_method_section(section)?;
        if let Some(k) = args.kappa {
            method.kappa = k;
        }
        if let Some(e) = args.epsilon {
            method.epsilon = e;
        }
        if let Some(f) = args.folds {
            method.folds = f;
        }
        method.validate()?;
        methods.push(method);
    }
    Ok(StudyBatch { designs, methods })
}

/// The study grid: linear cells over n x sigma scored by the modified BIC
/// and 5-fold CV, plus logistic cells scored by the modified BIC. The
/// radius-penalty criterion joins via --kappa-sweep, since its multiplier
/// is a per-setting hyperparameter.
fn paper_batches(args: &SimulateArgs) -> Vec<StudyBatch> {
    let reps = args.reps.unwrap_or(500);
    let seed = args.seed.unwrap_or(42);
    let m = args.m.unwrap_or(100);
    let kappa = args.kappa.unwrap_or(1.0);
    let epsilon = args.epsilon.unwrap_or(1e-3);
    let folds = args.folds.unwrap_or(5);

    let mut linear = Vec::new();
    for &n in &[500usize, 1000, 2000] {
        for &sigma in &[1.0, 2.0, 5.0] {
            let mut design = SimDesign::linear(n, sigma, reps, seed);
            design.m = m;
            linear.push(design);
        }
    }
    let mut logistic = Vec::new();
    for &n in &[500usize, 1000, 2000] {
        let mut design = SimDesign::logistic(n, reps, seed);
        design.m = m;
        logistic.push(design);
    }
    vec![
        StudyBatch {
            designs: linear,
            methods: vec![
                CriterionConfig::modified_bic(kappa, epsilon),
                CriterionConfig::cv(folds),
            ],
        },
        StudyBatch {
            designs: logistic,
            methods: vec![CriterionConfig::modified_bic(kappa, epsilon)],
        },
    ]
}

fn parse_kappa_sweep(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad kappa value '{part}'")))
        })
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let config: RunConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => {
            if !args.paper_tables {
                return Err(Error::InvalidInput(
                    "simulate needs --config or --paper-tables".into(),
                ));
            }
            RunConfig::default()
        }
    };

    let mut batches = if args.paper_tables {
        paper_batches(&args)
    } else {
        vec![config_batch(&config, &args)?]
    };

    if let Some(raw) = &args.kappa_sweep {
        let sweep = parse_kappa_sweep(raw)?;
        for batch in &mut batches {
            for &kappa in &sweep {
                batch.methods.push(CriterionConfig::panic(kappa));
            }
        }
    }
    if batches.iter().any(|b| b.methods.is_empty()) {
        return Err(Error::Config(
            "no selection methods: add [[method]] entries or pass --kappa-sweep".into(),
        ));
    }

    let duality = DualityConfig {
        solver: config.solver.clone(),
        tol_c: config.duality.tol_c,
        max_bisections: config.duality.max_bisections,
        lambda_cap: config.duality.lambda_cap,
    };
    let threads = args
        .threads
        .or(config.threads)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });

    let mut report: Option<SimulationReport> = None;
    for batch in &batches {
        let part = simulation::run_study(&batch.designs, &batch.methods, &duality, threads)?;
        report = Some(match report {
            Some(existing) => existing.merge(part),
            None => part,
        });
    }
    let report = report.expect("at least one batch");

    let (csv_path, json_path) = match &args.out {
        Some(prefix) => (
            prefix.with_extension("csv"),
            prefix.with_extension("json"),
        ),
        None => (
            PathBuf::from(&config.output.csv),
            PathBuf::from(&config.output.json),
        ),
    };
    for path in [&csv_path, &json_path] {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
    }
    std::fs::write(&csv_path, report.to_csv())?;
    std::fs::write(&json_path, report::to_json_string(&report)?)?;
    eprintln!(
        "wrote {} cells to {} and {}",
        report.cells.len(),
        csv_path.display(),
        json_path.display()
    );

    let violations = report.budget_violations();
    if !violations.is_empty() {
        for cell in &violations {
            eprintln!(
                "error: failure-budget-exceeded: method {} n {} excluded {}/{}",
                cell.method, cell.n, cell.excluded, cell.reps
            );
        }
        return Ok(4);
    }
    Ok(0)
}
