//! Penalized fits across a ladder of regularization constants: stronger
//! penalties zero out more coefficients, and the L1 proximal step leaves
//! bit-exact zeros.
//!
//! ```bash
//! cargo run --example fit_lasso
//! ```

use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::solver::fit_penalized;
use panic_select::{Family, PenaltySpec, SolverConfig};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 8,
        s: 3,
        ..SimDesign::linear(200, 0.5, 1, 7)
    };
    let (data, truth) = generate_problem(&design, 0)?;
    println!("true coefficients: {:?}\n", rounded(&truth.beta_star));

    let config = SolverConfig::default();
    println!("{:>8} {:>6} {:>10} {:>10}  slopes", "lambda", "iters", "risk", "nonzero");
    for lambda in [0.0, 0.05, 0.2, 0.8, 3.2] {
        let fit = fit_penalized(&Family::Linear, &data, &PenaltySpec::L1, lambda, &config, None)?;
        let nonzero = fit.beta.slopes.iter().filter(|b| **b != 0.0).count();
        println!(
            "{lambda:>8} {:>6} {:>10.5} {:>10}  {:?}",
            fit.iterations,
            fit.risk,
            nonzero,
            rounded(&fit.beta.slopes)
        );
    }
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}
