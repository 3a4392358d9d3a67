//! 5-fold cross-validation over the same radius grid the criteria use.
//! CV optimizes held-out prediction, which usually lands on a denser model
//! than the information criteria pick.
//!
//! ```bash
//! cargo run --example select_cv
//! ```

use panic_select::selection::{build_grid, select_cv, select_modified_bic};
use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::{DualityConfig, Family, PenaltySpec};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 12,
        s: 5,
        ..SimDesign::linear(400, 1.0, 1, 13)
    };
    let (data, truth) = generate_problem(&design, 0)?;
    let config = DualityConfig::default();
    let grid = build_grid(&Family::Linear, &data, &PenaltySpec::L1, 30, &config)?;

    let cv = select_cv(&Family::Linear, &data, &PenaltySpec::L1, &grid, 5, 42, &config)?;
    let bic = select_modified_bic(
        &Family::Linear,
        &data,
        &PenaltySpec::L1,
        &grid,
        1.0,
        1e-3,
        &config,
    )?;

    let active = |slopes: &[f64]| slopes.iter().filter(|b| **b != 0.0).count();
    println!("true active count: {}", truth.beta_star.iter().filter(|b| **b != 0.0).count());
    println!(
        "cv           : radius {:.4}, {} active",
        cv.chosen_radius,
        active(&cv.fit.beta.slopes)
    );
    println!(
        "modified bic : radius {:.4}, {} active\n",
        bic.chosen_radius,
        active(&bic.fit.beta.slopes)
    );

    println!("{:>4} {:>10} {:>14} {:>14}", "k", "C_k", "cv risk", "train risk");
    for rec in cv.table.iter().step_by(3) {
        println!(
            "{:>4} {:>10.4} {:>14.6} {:>14.6}{}",
            rec.index,
            rec.radius,
            rec.cv_risk.unwrap_or(f64::NAN),
            rec.risk.unwrap_or(f64::NAN),
            if rec.index == cv.chosen_index { "  <- chosen" } else { "" }
        );
    }
    Ok(())
}
