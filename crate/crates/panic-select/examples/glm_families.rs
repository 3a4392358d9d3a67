//! The four regression families: mean functions, losses, and gradients.
//!
//! ```bash
//! cargo run --example glm_families
//! ```

use panic_select::glm::{empirical_risk, mean_value, pointwise_loss, risk_gradient};
use panic_select::{CoefficientVector, Dataset, Family};

fn main() -> panic_select::Result<()> {
    let families = [
        Family::Linear,
        Family::Logistic,
        Family::Poisson,
        Family::gamma(2.0)?,
    ];

    let beta = CoefficientVector::new(0.2, vec![0.8, -0.5]);
    let x = [1.0, 0.3];

    println!("mean values at beta0=0.2, beta=(0.8,-0.5), x=(1.0,0.3):");
    for family in &families {
        println!("  {:<9} h = {:.6}", family.name(), mean_value(family, &beta, &x)?);
    }

    println!("\nper-observation losses (negative log-likelihood):");
    for (family, y) in families.iter().zip([1.3, 1.0, 2.0, 0.7]) {
        let loss = pointwise_loss(family, &beta, &x, y)?;
        println!("  {:<9} y = {y:<4} loss = {loss:.6}", family.name());
    }

    // Small Poisson sample: counts generated at the family's own mean.
    let data = Dataset::from_rows(
        vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![-1.0, 0.5], vec![0.5, -0.5]],
        vec![1.0, 3.0, 0.0, 2.0],
    )?;
    let risk = empirical_risk(&Family::Poisson, &beta, &data)?;
    let (g0, g) = risk_gradient(&Family::Poisson, &beta, &data)?;
    println!("\npoisson sample of {} points:", data.n());
    println!("  empirical risk      = {risk:.6}");
    println!("  intercept gradient  = {g0:.6}");
    println!("  slope gradient      = ({:.6}, {:.6})", g[0], g[1]);
    Ok(())
}
