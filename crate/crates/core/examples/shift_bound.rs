//! Moving every point of a Poisson process by a displacement field h costs at
//! most half the integral of |h|^2 against the intensity.

use config_ot::distance::shift_bound_check;
use config_ot::ot::AffineShift;
use config_ot::processes::PoissonModel;

fn main() -> config_ot::Result<()> {
    let model = PoissonModel::uniform(0.0, 1.0)?;
    for (name, h) in [("h = 0.1", AffineShift::constant(vec![0.1])), ("h = 0.1 x", AffineShift::linear(0.1, 1))] {
        let r = shift_bound_check(&model, &h, 100_000, 5)?;
        println!(
            "{name:10} bound = {:.6}, estimate = {:.6} +- {:.6}, pass = {}",
            r.bound, r.estimate.mean, r.estimate.std_error, r.pass
        );
    }
    Ok(())
}
