//! Seeded sampling of Poisson, binomial and mixed processes. Sample i uses
//! its own random stream, so results do not depend on thread count.

use config_ot::processes::{count_pmf, sample_many, BinomialModel, Density, PoissonModel, ProcessModel};

fn main() -> config_ot::Result<()> {
    let poisson = ProcessModel::Poisson(PoissonModel::new(3.0, Density::uniform(0.0, 1.0)?)?);
    let draws = sample_many(&poisson, 5, 42)?;
    for (i, c) in draws.iter().enumerate() {
        let xs: Vec<String> = c.points().iter().map(|p| format!("{:.3}", p.x())).collect();
        println!("poisson #{i}: [{}]", xs.join(", "));
    }
    let binomial = ProcessModel::Binomial(BinomialModel::new(2, Density::uniform(-1.0, 1.0)?)?);
    println!("binomial: {}", serde_json::to_string(&sample_many(&binomial, 1, 42)?[0]).unwrap());
    let pmf = count_pmf(&poisson, 8)?;
    println!("P(N = n), n <= 8: {:.4?} (tail {:.2e})", pmf.pmf(), pmf.tail_mass());
    Ok(())
}
