//! Selecting over a whole interval of radii instead of a finite grid:
//! coarse scan plus golden-section refinement. On the same instance the
//! interval minimizer and a fine grid's choice agree to within one grid
//! step.
//!
//! ```bash
//! cargo run --example continuous_selection
//! ```

use panic_select::selection::{build_grid, select_continuous, select_panic};
use panic_select::simulation::{generate_problem, SimDesign};
use panic_select::{DualityConfig, Family, PenaltySpec};

fn main() -> panic_select::Result<()> {
    let design = SimDesign {
        d: 8,
        s: 3,
        ..SimDesign::linear(400, 0.5, 1, 17)
    };
    let (data, truth) = generate_problem(&design, 0)?;
    let config = DualityConfig::default();

    let grid = build_grid(&Family::Linear, &data, &PenaltySpec::L1, 200, &config)?;
    let anchor = *grid.radii().last().unwrap();
    let spacing = anchor / 199.0;

    let on_grid = select_panic(&Family::Linear, &data, &PenaltySpec::L1, &grid, 1.0, &config)?;
    let continuous = select_continuous(
        &Family::Linear,
        &data,
        &PenaltySpec::L1,
        (0.0, anchor),
        1.0,
        &config,
    )?;

    println!("true L1 norm        : {:.5}", truth.l1_norm());
    println!("grid (m=200) choice : {:.5}", on_grid.chosen_radius);
    println!("interval choice     : {:.5}", continuous.chosen_radius);
    println!("grid spacing        : {:.5}", spacing);
    println!(
        "difference          : {:.5} ({}one spacing)",
        (on_grid.chosen_radius - continuous.chosen_radius).abs(),
        if (on_grid.chosen_radius - continuous.chosen_radius).abs() <= spacing + 1e-12 {
            "within "
        } else {
            "MORE THAN "
        }
    );
    println!(
        "interval mode evaluated {} radii (coarse scan + refinement)",
        continuous.table.len()
    );
    Ok(())
}
