use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ot::MonotoneMap1D;
use crate::point::{Configuration, Point};
use crate::stats::pairwise_sum;

/// A map `X → X`, possibly undefined at some points.
pub trait PointMap: Sync {
    fn apply(&self, x: &Point) -> Option<Point>;
}

impl<F> PointMap for F
where
    F: Fn(&Point) -> Option<Point> + Sync,
{
    fn apply(&self, x: &Point) -> Option<Point> {
        self(x)
    }
}

impl PointMap for MonotoneMap1D {
    fn apply(&self, x: &Point) -> Option<Point> {
        if x.dim() != 1 {
            return None;
        }
        Point::scalar(self.eval(x.x())).ok()
    }
}

/// `h(x) = scale · x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineShift {
    pub scale: f64,
    pub offset: Vec<f64>,
}

impl AffineShift {
    /// Constant displacement.
    pub fn constant(offset: Vec<f64>) -> Self {
        AffineShift { scale: 0.0, offset }
    }

    pub fn linear(scale: f64, dim: usize) -> Self {
        AffineShift { scale, offset: vec![0.0; dim] }
    }
}

impl PointMap for AffineShift {
    fn apply(&self, x: &Point) -> Option<Point> {
        if x.dim() != self.offset.len() {
            return None;
        }
        Point::new(x.coords().iter().zip(&self.offset).map(|(c, o)| self.scale * c + o).collect()).ok()
    }
}

/// `Id + h` for a displacement field `h`.
pub struct IdentityPlus<'a, H: PointMap + ?Sized>(pub &'a H);

impl<H: PointMap + ?Sized> PointMap for IdentityPlus<'_, H> {
    fn apply(&self, x: &Point) -> Option<Point> {
        let h = self.0.apply(x)?;
        if h.dim() != x.dim() {
            return None;
        }
        Point::new(x.coords().iter().zip(h.coords()).map(|(a, b)| a + b).collect()).ok()
    }
}

/// `t^Γ(Σ ε_x) = Σ ε_{t(x)}`.
pub fn lift_map<T: PointMap + ?Sized>(t: &T, eta: &Configuration) -> Result<Configuration> {
    let image = eta
        .points()
        .iter()
        .enumerate()
        .map(|(index, x)| t.apply(x).ok_or(Error::MapUndefined { index }))
        .collect::<Result<Vec<_>>>()?;
    Configuration::new(image)
}

/// `(⊕φ)^Γ(η) = Σ_{x∈η} φ(x)`.
pub fn lift_potential(phi: impl Fn(&Point) -> Option<f64>, eta: &Configuration) -> Result<f64> {
    let terms = eta
        .points()
        .iter()
        .enumerate()
        .map(|(index, x)| phi(x).filter(|v| v.is_finite()).ok_or(Error::MapUndefined { index }))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::config_cost_value;
    use crate::ot::{solve_1d_quadratic, QuantileGrid};
    use crate::point::half_sq_dist;

    fn cfg(xs: &[f64]) -> Configuration {
        Configuration::from_scalars(xs).unwrap()
    }

    #[test]
    fn identity_keeps_configuration() {
        let eta = cfg(&[0.3, 0.1]);
        let id = |x: &Point| Some(x.clone());
        assert_eq!(lift_map(&id, &eta).unwrap(), eta);
    }

    #[test]
    fn doubling() {
        let eta = cfg(&[0.2, 0.7]);
        let double = AffineShift::linear(2.0, 1);
        assert_eq!(lift_map(&double, &eta).unwrap(), cfg(&[0.4, 1.4]));
    }

    #[test]
    fn undefined_atom_reported() {
        let t = |x: &Point| (x.x() < 0.5).then(|| x.clone());
        assert_eq!(lift_map(&t, &cfg(&[0.1, 0.9])), Err(Error::MapUndefined { index: 1 }));
        assert_eq!(lift_potential(|x: &Point| (x.x() < 0.5).then_some(1.0), &cfg(&[0.1, 0.9])), Err(Error::MapUndefined { index: 1 }));
    }

    #[test]
    fn potential_sums() {
        assert_eq!(lift_potential(|x: &Point| Some(x.x() * x.x()), &Configuration::empty()).unwrap(), 0.0);
        assert_eq!(lift_potential(|x: &Point| Some(x.x() * x.x()), &cfg(&[1.0, 2.0])).unwrap(), 5.0);
    }

    #[test]
    fn lifted_coupling_cost_bounds_and_monotone_equality() {
        let s = QuantileGrid::from_quantile_fn(128, |u| u).unwrap();
        let t = QuantileGrid::from_quantile_fn(128, |u| u * u + u).unwrap();
        let (_, map) = solve_1d_quadratic(&s, &t).unwrap();
        let eta = cfg(&[0.05, 0.9, 0.4, 0.61]);
        let image = lift_map(&map, &eta).unwrap();
        let identity_cost: f64 = eta.points().iter().zip(image.points()).map(|(x, y)| half_sq_dist(x, y).unwrap()).sum();
        let c = config_cost_value(&eta, &image).unwrap();
        assert!(c <= identity_cost + 1e-15);
        assert!((c - identity_cost).abs() < 1e-12);
    }

    #[test]
    fn displacement_from_potential_derivative() {
        // t = φ' reproduces lift_map, checked by central differences
        let s = QuantileGrid::from_quantile_fn(64, |u| u).unwrap();
        let t = QuantileGrid::from_quantile_fn(64, |u| (2.0 * u).sqrt()).unwrap();
        let (_, map) = solve_1d_quadratic(&s, &t).unwrap();
        let eta = cfg(&[0.13, 0.52, 0.77]);
        let lifted = lift_map(&map, &eta).unwrap();
        let h = 1e-6;
        for (x, y) in eta.points().iter().zip(lifted.points()) {
            let d = (map.potential(x.x() + h) - map.potential(x.x() - h)) / (2.0 * h);
            assert!((x.x() - d - (x.x() - y.x())).abs() < 1e-6);
        }
    }
}
