//! Exact transport between two weighted point clouds with a dual certificate.

use config_ot::ot::solve_discrete_ot;
use config_ot::{DiscreteMeasure, Point};

fn main() -> config_ot::Result<()> {
    let pts = |xs: &[[f64; 2]]| xs.iter().map(|p| Point::new(p.to_vec())).collect::<config_ot::Result<Vec<_>>>();
    let mu = DiscreteMeasure::new(pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])?, vec![0.5, 0.25, 0.25])?;
    let nu = DiscreteMeasure::new(pts(&[[1.0, 1.0], [2.0, 0.0]])?, vec![0.6, 0.4])?;
    let plan = solve_discrete_ot(&mu, &nu)?;
    println!("cost        = {}", plan.cost);
    println!("dual value  = {}", plan.dual.dual_value);
    println!("duality gap = {:e}", plan.duality_gap());
    println!("marginal error = {:e}", plan.marginal_error(mu.weights(), nu.weights()));
    for (i, j, w) in &plan.entries {
        println!("  {i} -> {j}: {w}");
    }
    Ok(())
}
