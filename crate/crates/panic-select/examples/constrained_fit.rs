//! Solve the constrained problem `min R_n subject to ||beta||_1 <= C`
//! through its penalized dual: bisection finds the multiplier whose
//! solution lands on the ball boundary.
//!
//! ```bash
//! cargo run --example constrained_fit
//! ```

use panic_select::duality::solve_constrained;
use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::{ConstraintRadius, DualityConfig, Family, PenaltySpec};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 6,
        s: 3,
        ..SimDesign::linear(300, 1.0, 1, 11)
    };
    let (data, truth) = generate_problem(&design, 0)?;
    let config = DualityConfig::default();
    println!("true L1 norm: {:.4}\n", truth.l1_norm());

    println!(
        "{:>8} {:>12} {:>8} {:>12} {:>12}",
        "C", "lambda*", "active", "g(beta)", "risk"
    );
    for c in [0.0, 0.5, 1.0, 2.0, 4.0, 100.0] {
        let solution = solve_constrained(
            &Family::Linear,
            &data,
            &PenaltySpec::L1,
            ConstraintRadius::new(c)?,
            &config,
            None,
        )?;
        println!(
            "{c:>8} {:>12.6} {:>8} {:>12.6} {:>12.6}",
            solution.lambda_star, solution.active, solution.fit.penalty, solution.value
        );
    }
    println!("\nan inactive row (lambda* = 0) means C already contains the unpenalized fit");
    Ok(())
}
