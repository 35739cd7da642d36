use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::stats::pairwise_sum;

/// Default number of quantile levels.
pub const DEFAULT_GRID_SIZE: usize = 1024;

/// Values `q(u_i)` of a quantile function at the midpoint levels
/// `u_i = (i + ½) / M`, `i = 0..M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileGrid {
    values: Vec<f64>,
}

impl QuantileGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index, value });
        }
        if let Some(index) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Unsorted { index: index + 1 });
        }
        Ok(QuantileGrid { values })
    }

    /// Samples a quantile function on `m` midpoint levels.
    pub fn from_quantile_fn(m: usize, q: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(Self::levels(m).map(q).collect())
    }

    /// Left-continuous quantile grid `inf{x : F(x) ≥ u}` of a one-dimensional
    /// discrete measure, normalized to unit mass.
    pub fn from_measure(measure: &DiscreteMeasure, m: usize) -> Result<Self> {
        match measure.dim() {
            None => return Err(Error::EmptySupport),
            Some(1) => {}
            Some(k) => return Err(Error::NotOneDimensional(k)),
        }
        let mut atoms: Vec<(f64, f64)> = measure.atoms().iter().map(|p| p.x()).zip(measure.weights().iter().copied()).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = measure.total_mass();
        if total <= 0.0 {
            return Err(Error::EmptySupport);
        }
        let mut cdf = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for &(_, w) in &atoms {
            acc += w / total;
            cdf.push(acc);
        }
        let values = Self::levels(m)
            .map(|u| {
                let k = cdf.partition_point(|&c| c < u).min(atoms.len() - 1);
                atoms[k].0
            })
            .collect();
        Self::new(values)
    }

    pub fn levels(m: usize) -> impl Iterator<Item = f64> {
        (0..m).map(move |i| (i as f64 + 0.5) / m as f64)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Nondecreasing piecewise-linear map through `(breakpoints[i], values[i])`.
///
/// Outside the breakpoints the first and last segments are continued
/// linearly; a single breakpoint is continued as a translation. Repeated
/// breakpoints keep their first (smallest) value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneMap1D {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneMap1D {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::LengthMismatch { left: breakpoints.len(), right: values.len() });
        }
        if breakpoints.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(i) = breakpoints.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Unsorted { index: i + 1 });
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Unsorted { index: i + 1 });
        }
        let mut b = Vec::with_capacity(breakpoints.len());
        let mut v = Vec::with_capacity(values.len());
        for (x, y) in breakpoints.into_iter().zip(values) {
            if b.last() != Some(&x) {
                b.push(x);
                v.push(y);
            }
        }
        Ok(MonotoneMap1D { breakpoints: b, values: v })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Segment index `k` and slope used at `x`.
    fn segment(&self, x: f64) -> (usize, f64) {
        let b = &self.breakpoints;
        if b.len() == 1 {
            return (0, 1.0);
        }
        let k = b.partition_point(|&t| t <= x).saturating_sub(1).min(b.len() - 2);
        let slope = (self.values[k + 1] - self.values[k]) / (b[k + 1] - b[k]);
        (k, slope)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (k, slope) = self.segment(x);
        self.values[k] + slope * (x - self.breakpoints[k])
    }

    /// Convex potential `φ(x) = ∫_{b₀}^{x} t`, so that `φ' = t`.
    pub fn potential(&self, x: f64) -> f64 {
        let (k, slope) = self.segment(x);
        let b = &self.breakpoints;
        let mut acc = Vec::with_capacity(k);
        for s in 0..k {
            acc.push(0.5 * (self.values[s] + self.values[s + 1]) * (b[s + 1] - b[s]));
        }
        let dx = x - b[k];
        pairwise_sum(&acc) + self.values[k] * dx + 0.5 * slope * dx * dx
    }

    /// Nondecreasing on the breakpoints.
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Quadratic transport between two measures on the line given by their
/// quantile grids: cost `(1/2M) Σ (q₁(u_i) − q₂(u_i))²` and the monotone map
/// `q₂ ∘ q₁⁻¹`.
pub fn solve_1d_quadratic(source: &QuantileGrid, target: &QuantileGrid) -> Result<(f64, MonotoneMap1D)> {
    if source.len() != target.len() {
        return Err(Error::LengthMismatch { left: source.len(), right: target.len() });
    }
    let m = source.len() as f64;
    let sq: Vec<f64> = source.values.iter().zip(&target.values).map(|(a, b)| (a - b) * (a - b)).collect();
    let cost = pairwise_sum(&sq) / (2.0 * m);
    let map = MonotoneMap1D::new(source.values.clone(), target.values.clone())?;
    Ok((cost, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Point;

    #[test]
    fn identical_uniforms() {
        let g = QuantileGrid::from_quantile_fn(64, |u| u).unwrap();
        let (c, t) = solve_1d_quadratic(&g, &g).unwrap();
        assert_eq!(c, 0.0);
        for x in [0.0, 0.3, 0.99, 1.5] {
            assert!((t.eval(x) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_doubling() {
        // midpoint rule for ½∫u²: ½(1/3 − 1/(12M²))
        let m = 256;
        let s = QuantileGrid::from_quantile_fn(m, |u| u).unwrap();
        let t = QuantileGrid::from_quantile_fn(m, |u| 2.0 * u).unwrap();
        let (c, map) = solve_1d_quadratic(&s, &t).unwrap();
        let expect = 0.5 * (1.0 / 3.0 - 1.0 / (12.0 * (m * m) as f64));
        assert!((c - expect).abs() < 1e-14);
        assert!(map.is_monotone());
        for x in [-0.5, 0.0, 0.25, 0.7, 1.0, 2.0] {
            assert!((map.eval(x) - 2.0 * x).abs() < 1e-12, "t({x}) = {}", map.eval(x));
            assert!((map.potential(x) - (x * x - s.values()[0].powi(2))).abs() < 1e-12);
        }
    }

    #[test]
    fn point_masses() {
        let a = QuantileGrid::new(vec![0.0; 8]).unwrap();
        let b = QuantileGrid::new(vec![3.0; 8]).unwrap();
        let (c, t) = solve_1d_quadratic(&a, &b).unwrap();
        assert_eq!(c, 4.5);
        assert_eq!(t.eval(0.0), 3.0);
    }

    #[test]
    fn rejects_unsorted_and_wrong_dimension() {
        assert_eq!(QuantileGrid::new(vec![0.0, 2.0, 1.0]), Err(Error::Unsorted { index: 2 }));
        let m = DiscreteMeasure::uniform(vec![Point::new(vec![0.0, 1.0]).unwrap()], 1.0).unwrap();
        assert_eq!(QuantileGrid::from_measure(&m, 4), Err(Error::NotOneDimensional(2)));
    }

    #[test]
    fn left_continuous_quantiles_of_atoms() {
        let pts = [2.0, 0.0].iter().map(|&x| Point::scalar(x).unwrap()).collect();
        let m = DiscreteMeasure::new(pts, vec![0.5, 0.5]).unwrap();
        let g = QuantileGrid::from_measure(&m, 4).unwrap();
        assert_eq!(g.values(), &[0.0, 0.0, 2.0, 2.0]);
    }

    #[test]
    fn repeated_breakpoints_keep_first_value() {
        let t = MonotoneMap1D::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.eval(0.0), 1.0);
        assert_eq!(t.eval(0.5), 2.0);
    }
}
