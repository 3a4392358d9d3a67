//! The regularization path `lambda -> g(beta_lambda)` is non-increasing,
//! and wherever the penalty level strictly drops the risk strictly rises.
//! Those two facts are what make bisection inversion work.
//!
//! ```bash
//! cargo run --example regularization_path
//! ```

use panic_select::duality::path_value;
use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::{DualityConfig, Family, PenaltySpec};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 6,
        s: 3,
        ..SimDesign::linear(250, 1.0, 1, 3)
    };
    let (data, _) = generate_problem(&design, 0)?;
    let config = DualityConfig::default();

    println!("{:>10} {:>14} {:>14}", "lambda", "g(beta)", "risk");
    let mut last: Option<(f64, f64)> = None;
    for exponent in -8..4 {
        let lambda = if exponent == -8 { 0.0 } else { 2f64.powi(exponent) };
        let point = path_value(&Family::Linear, &data, &PenaltySpec::L1, lambda, &config)?;
        let marker = match last {
            Some((g, _)) if point.penalty_level > g + 1e-8 => "  <- would violate monotonicity!",
            _ => "",
        };
        println!(
            "{lambda:>10.4} {:>14.8} {:>14.8}{marker}",
            point.penalty_level, point.risk
        );
        last = Some((point.penalty_level, point.risk));
    }
    Ok(())
}
