//! Support of an optimal plan is cyclically monotone; swapping two targets of
//! an optimal matching breaks it and the check returns the swap.

use config_ot::matching::{check_cyclical_monotonicity, check_cyclical_monotonicity_cycles, config_cost};
use config_ot::Configuration;

fn main() -> config_ot::Result<()> {
    let eta: Vec<Configuration> =
        [[0.0, 1.0], [2.0, 3.0], [5.0, 6.5], [8.0, 9.0]].iter().map(|x| Configuration::from_scalars(x)).collect::<Result<_, _>>()?;
    let omega: Vec<Configuration> =
        [[0.2, 1.1], [2.5, 2.9], [5.5, 6.0], [7.9, 9.3]].iter().map(|x| Configuration::from_scalars(x)).collect::<Result<_, _>>()?;
    let pairs: Vec<_> = eta.iter().cloned().zip(omega.iter().cloned()).collect();
    println!("c(eta_0, omega_0) = {}", config_cost(&eta[0], &omega[0])?.0);

    let ok = check_cyclical_monotonicity_cycles(&pairs, 5)?;
    println!("sorted pairing monotone: {}", ok.monotone);

    let mut swapped = pairs.clone();
    let (a, b) = (swapped[0].1.clone(), swapped[3].1.clone());
    swapped[0].1 = b;
    swapped[3].1 = a;
    let bad = check_cyclical_monotonicity(&swapped, 10_000)?;
    println!("after swap: monotone = {}, witness = {:?}, transposition = {}", bad.monotone, bad.witness, bad.witness_is_transposition());
    Ok(())
}
