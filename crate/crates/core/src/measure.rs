//! Weighted atomic measures and truncated count laws.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;
use crate::stats::pairwise_sum;

/// Relative tolerance used for mass bookkeeping.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Finitely many weighted atoms in `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub struct DiscreteMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
    total_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
}

impl TryFrom<RawMeasure> for DiscreteMeasure {
    type Error = Error;
    fn try_from(raw: RawMeasure) -> Result<Self> {
        DiscreteMeasure::new(raw.atoms, raw.weights)
    }
}

impl From<DiscreteMeasure> for RawMeasure {
    fn from(m: DiscreteMeasure) -> Self {
        RawMeasure { atoms: m.atoms, weights: m.weights }
    }
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::LengthMismatch { left: atoms.len(), right: weights.len() });
        }
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeight { index, value });
        }
        if let Some(first) = atoms.first() {
            if let Some(p) = atoms.iter().find(|p| p.dim() != first.dim()) {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: p.dim() });
            }
        }
        let total_mass = pairwise_sum(&weights);
        Ok(DiscreteMeasure { atoms, weights, total_mass })
    }

    /// Uniform weights `mass / n` on the given atoms.
    pub fn uniform(atoms: Vec<Point>, mass: f64) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let w = mass / atoms.len() as f64;
        let n = atoms.len();
        Self::new(atoms, vec![w; n])
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.atoms.first().map(Point::dim)
    }

    /// True when every atom carries exactly the same weight.
    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Multiplies all weights by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.atoms.clone(), self.weights.iter().map(|w| w * factor).collect())
    }

    /// Rescales to unit total mass.
    pub fn normalized(&self) -> Result<Self> {
        if self.total_mass <= 0.0 {
            return Err(Error::EmptySupport);
        }
        self.scaled(1.0 / self.total_mass)
    }

    /// Integral of `f` against the measure.
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        let terms: Vec<f64> = self.atoms.iter().zip(&self.weights).map(|(a, w)| w * f(a)).collect();
        pairwise_sum(&terms)
    }
}

/// Law of the number of atoms, truncated at `N_max = pmf.len() − 1`, with the
/// remaining probability reported as `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDistribution {
    pmf: Vec<f64>,
    tail_mass: f64,
}

impl CountDistribution {
    pub fn new(pmf: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if let Some((i, p)) = pmf.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidCountDistribution(format!("p_{i} = {p}")));
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return Err(Error::InvalidCountDistribution(format!("tail mass {tail_mass}")));
        }
        let total = pairwise_sum(&pmf) + tail_mass;
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidCountDistribution(format!("total probability {total}")));
        }
        Ok(CountDistribution { pmf, tail_mass })
    }

    /// Poisson(λ) truncated at `nmax`. The tail is summed explicitly so that
    /// tiny remainders are not lost to cancellation.
    pub fn poisson(lambda: f64, nmax: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::NonPositiveMass(lambda));
        }
        let log_p = |n: usize, log_fact: f64| -lambda + n as f64 * lambda.ln() - log_fact;
        let mut pmf = Vec::with_capacity(nmax + 1);
        let mut log_fact = 0.0;
        for n in 0..=nmax {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            pmf.push(log_p(n, log_fact).exp());
        }
        let mut tail = Vec::new();
        let mut n = nmax;
        loop {
            n += 1;
            log_fact += (n as f64).ln();
            let p = log_p(n, log_fact).exp();
            tail.push(p);
            if n as f64 > lambda && (p == 0.0 || p < 1e-40 * tail[0].max(f64::MIN_POSITIVE)) {
                break;
            }
        }
        Self::new(pmf, pairwise_sum(&tail))
    }

    /// The law of a process with exactly `n` atoms, truncated at `nmax ≥ n`.
    pub fn point_mass(n: usize, nmax: usize) -> Self {
        let mut pmf = vec![0.0; nmax.max(n) + 1];
        pmf[n] = 1.0;
        CountDistribution { pmf, tail_mass: 0.0 }
    }

    /// Empirical frequencies of the given counts; no tail.
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptySamples);
        }
        let nmax = *counts.iter().max().unwrap();
        let mut pmf = vec![0.0; nmax + 1];
        for &c in counts {
            pmf[c] += 1.0;
        }
        let m = counts.len() as f64;
        pmf.iter_mut().for_each(|p| *p /= m);
        Self::new(pmf, 0.0)
    }

    /// Finite mixture `Σ w_i · law_i` with weights summing to one.
    pub fn mixture(components: &[(f64, CountDistribution)]) -> Result<Self> {
        let len = components.iter().map(|(_, c)| c.pmf.len()).max().unwrap_or(1);
        let mut pmf = vec![0.0; len];
        let mut tail = 0.0;
        for (w, c) in components {
            for (n, p) in c.pmf.iter().enumerate() {
                pmf[n] += w * p;
            }
            tail += w * c.tail_mass;
        }
        Self::new(pmf, tail)
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P(N = n)`, zero beyond the truncation point.
    pub fn p(&self, n: usize) -> f64 {
        self.pmf.get(n).copied().unwrap_or(0.0)
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn nmax(&self) -> usize {
        self.pmf.len() - 1
    }

    /// Mean of the truncated part.
    pub fn truncated_mean(&self) -> f64 {
        let terms: Vec<f64> = self.pmf.iter().enumerate().map(|(n, p)| n as f64 * p).collect();
        pairwise_sum(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_validation() {
        let a = vec![Point::scalar(0.0).unwrap(), Point::scalar(1.0).unwrap()];
        assert!(matches!(DiscreteMeasure::new(a.clone(), vec![0.5]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(DiscreteMeasure::new(a.clone(), vec![0.5, -0.1]), Err(Error::InvalidWeight { index: 1, .. })));
        let m = DiscreteMeasure::new(a, vec![0.25, 0.75]).unwrap();
        assert_eq!(m.total_mass(), 1.0);
        assert!(!m.is_uniform());
        let s = m.scaled(2.0).unwrap();
        assert!((s.total_mass() - 2.0).abs() < 1e-12);
        assert!((s.normalized().unwrap().total_mass() - 1.0).abs() < MASS_TOLERANCE);
    }

    #[test]
    fn measure_json() {
        let m: DiscreteMeasure = serde_json::from_str(r#"{"atoms":[[0.0],[2.0]],"weights":[0.5,0.5]}"#).unwrap();
        assert!(m.is_uniform());
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"atoms":[[0.0],[2.0]],"weights":[0.5,0.5]}"#);
    }

    #[test]
    fn poisson_one() {
        let p = CountDistribution::poisson(1.0, 20).unwrap();
        let e = (-1.0f64).exp();
        assert!((p.p(0) - e).abs() < 1e-15);
        assert!((p.p(1) - e).abs() < 1e-15);
        assert!((p.p(0) - 0.36788).abs() < 1e-5);
        // remainder ≤ p_21 · Σ_k 1/22^k < 1.1 · e⁻¹/21!
        let bound = 1.1 * e / (1..=21).map(|k| k as f64).product::<f64>();
        assert!(p.tail_mass() < 1e-18);
        assert!(p.tail_mass() <= bound);
        assert!((p.pmf().iter().sum::<f64>() + p.tail_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_rejects_nonpositive_rate() {
        assert!(CountDistribution::poisson(0.0, 5).is_err());
        assert!(CountDistribution::poisson(-1.0, 5).is_err());
    }

    #[test]
    fn point_mass_and_mixture() {
        let b = CountDistribution::point_mass(3, 5);
        assert_eq!(b.p(3), 1.0);
        assert_eq!(b.p(2), 0.0);
        assert_eq!(b.p(40), 0.0);

        let m = CountDistribution::mixture(&[
            (0.5, CountDistribution::poisson(1.0, 20).unwrap()),
            (0.5, CountDistribution::poisson(2.0, 20).unwrap()),
        ])
        .unwrap();
        let expect = 0.5 * (-1.0f64).exp() + 0.5 * (-2.0f64).exp();
        assert!((m.p(0) - expect).abs() < 1e-15);
    }

    #[test]
    fn from_counts_frequencies() {
        let c = CountDistribution::from_counts(&[0, 1, 1, 3]).unwrap();
        assert_eq!(c.pmf(), &[0.25, 0.5, 0.0, 0.25]);
        assert_eq!(CountDistribution::from_counts(&[]), Err(Error::EmptySamples));
    }

    #[test]
    fn rejects_bad_total() {
        assert!(CountDistribution::new(vec![0.5, 0.4], 0.0).is_err());
        assert!(CountDistribution::new(vec![0.5, 0.4], 0.1).is_ok());
    }
}
