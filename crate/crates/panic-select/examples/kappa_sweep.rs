//! Calibration data for the radius-penalty multiplier: the same cells run
//! under several kappa values. Small kappa tracks the optimal norm closely
//! but keeps dense models; larger kappa recovers the support at some cost
//! in norm error.
//!
//! ```bash
//! cargo run --example kappa_sweep
//! ```

use panic_select::selection::CriterionConfig;
use panic_select::simulation::{run_study, SimDesign};
use panic_select::DualityConfig;

fn main() -> panic_select::Result<()> {
    let designs = [SimDesign { m: 50, ..SimDesign::linear(400, 1.0, 20, 9) }];
    let methods: Vec<CriterionConfig> = [0.1, 0.5, 1.0, 2.0, 5.0]
        .into_iter()
        .map(CriterionConfig::panic)
        .collect();
    let report = run_study(&designs, &methods, &DualityConfig::default(), 4)?;

    println!("\nsweep at n=400, sigma=1, 20 replications (true model has 10 active of 20):");
    println!("{:>8} {:>12} {:>12} {:>8} {:>10}", "kappa", "error", "|error|", "#var", "#w.var");
    for cell in &report.cells {
        let fmt = |s: &Option<panic_select::simulation::Stat>| {
            s.as_ref()
                .map(|v| format!("{:.4}", v.mean))
                .unwrap_or_default()
        };
        println!(
            "{:>8} {:>12} {:>12} {:>8} {:>10}",
            cell.kappa.unwrap_or(f64::NAN),
            fmt(&cell.error),
            fmt(&cell.abs_error),
            fmt(&cell.n_var),
            fmt(&cell.n_wrong_var)
        );
    }
    Ok(())
}
