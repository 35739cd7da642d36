//! Cox processes with random intensities: the expected transport cost between
//! the intensity draws.

use config_ot::distance::{cox_distance, cox_mixture_expected_distance};
use config_ot::processes::{CoxComponent, CoxMixture, CoxModel, PoissonModel};

fn main() -> config_ot::Result<()> {
    let u1 = PoissonModel::uniform(0.0, 1.0)?;
    let u2 = PoissonModel::uniform(0.0, 2.0)?;

    let degenerate = cox_distance(&CoxModel::degenerate(u1.clone(), u2.clone()), 1000, 1, 4096)?;
    println!("degenerate: E[T_e] = {} +- {}", degenerate.distance, degenerate.std_error);

    let mixture = CoxMixture::new(vec![
        CoxComponent { weight: 0.5, first: u1.clone(), second: u2 },
        CoxComponent { weight: 0.5, first: u1.clone(), second: u1 },
    ])?;
    let expected = cox_mixture_expected_distance(&mixture, 4096)?;
    let est = cox_distance(&CoxModel::mixture(mixture), 10_000, 1, 4096)?;
    println!("mixture:    E[T_e] = {} +- {:.5} (closed form {expected})", est.distance, est.std_error);
    Ok(())
}
