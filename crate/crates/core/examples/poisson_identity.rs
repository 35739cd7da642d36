//! The squared distance between two unit-mass Poisson processes equals the
//! squared transport cost between their intensities. The lifted coupling
//! `(eta, t(eta))` is sampled and compared to the closed form.

use config_ot::distance::{
    count_paired_poisson_samples, empirical_process_distance, poisson_coupling_estimate, poisson_distance, Z_SCORE,
};
use config_ot::processes::PoissonModel;

fn main() -> config_ot::Result<()> {
    let s1 = PoissonModel::uniform(0.0, 1.0)?;
    let s2 = PoissonModel::uniform(0.0, 2.0)?;
    let closed = poisson_distance(&s1, &s2, 4096)?;
    let est = poisson_coupling_estimate(&s1, &s2, 100_000, 7, 4096)?.estimate;
    println!("closed form       = {closed:.6}");
    println!("coupling estimate = {:.6} +- {:.6}", est.mean, est.std_error);
    println!("within {Z_SCORE} SE: {}", est.within(closed, Z_SCORE));

    for m in [50, 100, 200] {
        let (a, b) = count_paired_poisson_samples(&s1, &s2, m, 11)?;
        let emp = empirical_process_distance(&a, &b, None)?;
        println!("empirical, m = {m:3}: {} +- {:.4}", emp.w2(), emp.std_error);
    }
    Ok(())
}
