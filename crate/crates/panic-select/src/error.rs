//! Error codes shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments, configuration, or data files.
    #[error("invalid-input: {0}")]
    InvalidInput(String),

    /// A loss, mean, or gradient left the representable range
    /// (e.g. `exp` overflow in the Poisson/Gamma linear predictor).
    #[error("domain-error: {0}")]
    Domain(String),

    /// The iterative solver could not produce a usable iterate.
    #[error("solver-failure: {0}")]
    SolverFailure(String),

    /// Bracket expansion failed: the penalty level never dropped below the
    /// target radius within the lambda cap.
    #[error("path-inversion-failed: g(beta_lambda) stayed above C = {c} for lambda up to {lambda_cap:e}")]
    PathInversionFailed { c: f64, lambda_cap: f64 },

    /// The unpenalized fit did not converge, so no grid anchor exists.
    #[error("unbounded-erm: {0}")]
    UnboundedErm(String),

    /// The unpenalized fit has zero penalty norm; an evenly spaced radius
    /// grid cannot be built.
    #[error("degenerate-grid: {0}")]
    DegenerateGrid(String),

    /// Every grid point failed to solve; no criterion can be evaluated.
    #[error("all-grid-points-failed: {0}")]
    AllGridPointsFailed(String),

    /// A cross-validation fold stayed degenerate after one reshuffle.
    #[error("cv-degenerate-fold: {0}")]
    CvDegenerateFold(String),

    /// More than the allowed fraction of replications failed in a cell.
    #[error("failure-budget-exceeded: {0}")]
    FailureBudgetExceeded(String),

    #[error("csv-error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io-error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json-error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config-error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code class: 2 input, 3 numerical, 4 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::Csv(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Config(_) => 2,
            Error::FailureBudgetExceeded(_) => 4,
            _ => 3,
        }
    }
}
