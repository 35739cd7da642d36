//! Cost between two configurations: optimal matching, brute-force check, and
//! the infinite cost of configurations with different numbers of points.

use config_ot::matching::{brute_force_cost, config_cost};
use config_ot::Configuration;

fn main() -> config_ot::Result<()> {
    let eta = Configuration::from_scalars(&[0.0, 1.0])?;
    let omega = Configuration::from_scalars(&[0.5, 3.0])?;
    let (cost, matching) = config_cost(&eta, &omega)?;
    println!("c(eta, omega) = {cost}");
    println!("matching      = {:?}", matching.map(|m| m.permutation));
    println!("brute force   = {}", brute_force_cost(&eta, &omega)?);

    let short = Configuration::from_scalars(&[0.0])?;
    let (cost, _) = config_cost(&short, &omega)?;
    println!("c(one point, two points) = {cost}");
    Ok(())
}
