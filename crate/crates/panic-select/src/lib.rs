//! Consistent complexity selection for regularized GLM regressions.
//!
//! The library fits linear, logistic, Poisson, and Gamma regressions under
//! L1, L2, or elastic-net constraints, and selects the constraint radius by
//! penalized-risk information criteria with consistency guarantees:
//!
//! * [`glm`] — loss, mean, risk, and gradient for the four families.
//! * [`penalty`] — the regularizers, their proximal operators, and ball
//!   membership.
//! * [`solver`] — proximal-gradient solver for the penalized problem.
//! * [`duality`] — the constrained problem solved through its penalized
//!   dual by bisection on the regularization path.
//! * [`selection`] — radius grids, the radius-penalty criterion, the
//!   modified BIC with monotonized degrees of freedom, k-fold CV, and
//!   continuous interval refinement.
//! * [`simulation`] — seeded synthetic studies with CSV/JSON reports.
//!
//! Each capability has a runnable example under `examples/`; the
//! `panic-select` binary exposes `fit`, `select`, and `simulate`
//! subcommands over CSV data.

pub mod cli;
pub mod duality;
mod error;
pub mod glm;
pub mod penalty;
pub mod report;
pub mod selection;
pub mod simulation;
pub mod solver;

pub use error::{Error, Result};
pub use glm::{CoefficientVector, Dataset, Family};
pub use penalty::{ConstraintRadius, PenaltySpec};
pub use solver::{FitResult, SolverConfig};
pub use duality::{ConstrainedSolution, DualityConfig, PathPoint};
pub use selection::{CriterionConfig, Grid, SelectionMethod, SelectionResult};
pub use simulation::{SimDesign, SimulationReport};
