//! Radius selection by the penalized-risk criterion: minimize
//! `risk(C_k) + kappa * C_k * sqrt(log n / n)` over an evenly spaced grid
//! anchored at the unpenalized norm.
//!
//! ```bash
//! cargo run --example select_panic
//! ```

use panic_select::selection::{build_grid, select_panic};
use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::{DualityConfig, Family, PenaltySpec};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 10,
        s: 4,
        ..SimDesign::linear(500, 0.5, 1, 21)
    };
    let (data, truth) = generate_problem(&design, 0)?;
    let config = DualityConfig::default();

    let grid = build_grid(&Family::Linear, &data, &PenaltySpec::L1, 40, &config)?;
    let result = select_panic(&Family::Linear, &data, &PenaltySpec::L1, &grid, 1.0, &config)?;

    println!("true L1 norm      : {:.4}", truth.l1_norm());
    println!("chosen radius     : {:.4} (grid index {})", result.chosen_radius, result.chosen_index);
    println!("active coefficients: {}\n", result.fit.beta.slopes.iter().filter(|b| **b != 0.0).count());

    println!("{:>4} {:>10} {:>12} {:>12} {:>12}", "k", "C_k", "risk", "penalty", "criterion");
    for rec in result.table.iter().step_by(4) {
        println!(
            "{:>4} {:>10.4} {:>12.6} {:>12.6} {:>12.6}{}",
            rec.index,
            rec.radius,
            rec.risk.unwrap_or(f64::NAN),
            rec.penalty_term.unwrap_or(f64::NAN),
            rec.criterion.unwrap_or(f64::NAN),
            if rec.index == result.chosen_index { "  <- chosen" } else { "" }
        );
    }
    Ok(())
}
