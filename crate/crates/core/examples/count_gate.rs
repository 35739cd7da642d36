//! Processes whose numbers of points have different laws are at infinite
//! distance.

use config_ot::distance::process_distance;
use config_ot::processes::{BinomialModel, Density, PoissonModel, ProcessModel};

fn main() -> config_ot::Result<()> {
    let u = Density::uniform(0.0, 1.0)?;
    let pois = |mass| PoissonModel::new(mass, u.clone()).map(ProcessModel::Poisson);
    let bin = |n| BinomialModel::new(n, u.clone()).map(ProcessModel::Binomial);
    let cases = [
        ("Poisson(1) vs Poisson(2)", pois(1.0)?, pois(2.0)?),
        ("Binomial(2) vs Binomial(3)", bin(2)?, bin(3)?),
        ("Poisson(1) vs Poisson(1)", pois(1.0)?, pois(1.0)?),
        ("Binomial(3) vs Binomial(3)", bin(3)?, bin(3)?),
    ];
    for (name, mu, nu) in cases {
        let d = process_distance(&mu, &nu, 20, 1e-12, 1024)?;
        println!("{name:28} w2 = {:8}  gate = {:?}  via {:?}", d.w2.to_string(), d.gate, d.method);
    }
    Ok(())
}
