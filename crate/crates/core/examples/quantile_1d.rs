//! One-dimensional quadratic transport by quantile functions.

use config_ot::ot::solve_1d_quadratic;
use config_ot::processes::Density;

fn main() -> config_ot::Result<()> {
    let m = 4096;
    let source = Density::uniform(0.0, 1.0)?.quantile_grid(m)?;
    let target = Density::uniform(0.0, 2.0)?.quantile_grid(m)?;
    let (cost, map) = solve_1d_quadratic(&source, &target)?;
    println!("T_e(U[0,1], U[0,2])^2 = {cost:.9} (exact 1/6 = {:.9})", 1.0 / 6.0);
    println!("map monotone: {}", map.is_monotone());
    for x in [0.0, 0.25, 0.5, 1.0] {
        println!("  t({x}) = {:.6}, potential = {:.6}", map.eval(x), map.potential(x));
    }
    Ok(())
}
