//! Point-process models, seeded samplers, and count laws.
//!
//! A Poisson process with intensity `λ · density` draws `N ~ Poisson(λ)` and
//! then `N` independent atoms from the density. A binomial process has a fixed
//! number of atoms. A Cox process first draws a random intensity; here the
//! intensities of the two processes being compared are drawn jointly.
//!
//! Every sampler takes an explicit seed. Repeated estimation uses
//! [`stream_rng`]`(seed, index)`, one ChaCha stream per sample, so results do
//! not depend on how work is scheduled.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{CountDistribution, DiscreteMeasure, MASS_TOLERANCE};
use crate::ot::QuantileGrid;
use crate::point::{Configuration, Point};
use crate::stats::{pairwise_sum, stream_rng};

/// A probability density (or probability mass function) on `R^k`.
///
/// `uniform` and `piecewise` are diffuse densities on the line;
/// `discrete` is a normalized weighted point set in any dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Uniform { a: f64, b: f64 },
    /// Piece `k` spans `[edges[k], edges[k+1]]` and carries probability `weights[k]`.
    Piecewise { edges: Vec<f64>, weights: Vec<f64> },
    Discrete { atoms: Vec<Point>, weights: Vec<f64> },
}

impl Density {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let d = Density::Uniform { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let normalized = |w: &[f64]| -> Result<()> {
            if let Some((index, &value)) = w.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::InvalidWeight { index, value });
            }
            let total = pairwise_sum(w);
            if (total - 1.0).abs() > MASS_TOLERANCE {
                return Err(Error::InvalidDensity(format!("weights sum to {total}, expected 1")));
            }
            Ok(())
        };
        match self {
            Density::Uniform { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidDensity(format!("uniform needs a < b, got [{a}, {b}]")));
                }
            }
            Density::Piecewise { edges, weights } => {
                if edges.len() != weights.len() + 1 || weights.is_empty() {
                    return Err(Error::InvalidDensity("piecewise needs edges.len() == weights.len() + 1".into()));
                }
                if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidDensity("edges must be finite and strictly increasing".into()));
                }
                normalized(weights)?;
            }
            Density::Discrete { atoms, weights } => {
                DiscreteMeasure::new(atoms.clone(), weights.clone())?;
                if atoms.is_empty() {
                    return Err(Error::EmptySupport);
                }
                normalized(weights)?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Density::Discrete { atoms, .. } => atoms.first().map_or(1, Point::dim),
            _ => 1,
        }
    }

    /// Absolutely continuous with respect to Lebesgue measure.
    pub fn is_diffuse(&self) -> bool {
        !matches!(self, Density::Discrete { .. })
    }

    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let coords = match self {
            Density::Uniform { a, b } => vec![a + (b - a) * rng.random::<f64>()],
            Density::Piecewise { edges, weights } => {
                let k = pick(weights, rng.random::<f64>());
                vec![edges[k] + (edges[k + 1] - edges[k]) * rng.random::<f64>()]
            }
            Density::Discrete { atoms, weights } => return atoms[pick(weights, rng.random::<f64>())].clone(),
        };
        Point::new(coords).expect("finite support")
    }

    /// Left-continuous quantile `inf{x : F(x) ≥ u}` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        match self {
            Density::Uniform { a, b } => Ok(a + (b - a) * u),
            Density::Piecewise { edges, weights } => {
                let mut start = 0.0;
                for (k, &w) in weights.iter().enumerate() {
                    let end = start + w;
                    if w > 0.0 && (u <= end || k == weights.len() - 1) {
                        let frac = ((u - start) / w).clamp(0.0, 1.0);
                        return Ok(edges[k] + frac * (edges[k + 1] - edges[k]));
                    }
                    start = end;
                }
                Ok(*edges.last().unwrap())
            }
            Density::Discrete { atoms, weights } => {
                if self.dim() != 1 {
                    return Err(Error::NotOneDimensional(self.dim()));
                }
                let mut order: Vec<usize> = (0..atoms.len()).collect();
                order.sort_by(|&i, &j| atoms[i].x().total_cmp(&atoms[j].x()));
                let mut acc = 0.0;
                for &i in &order {
                    acc += weights[i];
                    if acc >= u {
                        return Ok(atoms[i].x());
                    }
                }
                Ok(atoms[*order.last().unwrap()].x())
            }
        }
    }

    /// Quantiles at the `m` midpoint levels.
    pub fn quantile_grid(&self, m: usize) -> Result<QuantileGrid> {
        match self {
            Density::Discrete { atoms, weights } => {
                QuantileGrid::from_measure(&DiscreteMeasure::new(atoms.clone(), weights.clone())?, m)
            }
            _ => QuantileGrid::new(QuantileGrid::levels(m).map(|u| self.quantile(u)).collect::<Result<_>>()?),
        }
    }

    /// Atomic approximation: the density itself when discrete, otherwise
    /// `m` equally weighted quantile atoms.
    pub fn to_measure(&self, m: usize) -> Result<DiscreteMeasure> {
        match self {
            Density::Discrete { atoms, weights } => DiscreteMeasure::new(atoms.clone(), weights.clone()),
            _ => {
                let grid = self.quantile_grid(m)?;
                DiscreteMeasure::uniform(grid.values().iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?, 1.0)
            }
        }
    }

    /// `∫ f` against the density. Composite Simpson on each piece (exact for
    /// cubic integrands); a weighted sum for discrete densities.
    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        const PANELS: usize = 64;
        let simpson = |lo: f64, hi: f64, mass: f64| {
            let h = (hi - lo) / PANELS as f64;
            let terms: Vec<f64> = (0..=PANELS)
                .map(|i| {
                    let w = if i == 0 || i == PANELS { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * f(&Point::scalar(lo + i as f64 * h).expect("finite"))
                })
                .collect();
            mass * pairwise_sum(&terms) / (3.0 * PANELS as f64)
        };
        match self {
            Density::Uniform { a, b } => simpson(*a, *b, 1.0),
            Density::Piecewise { edges, weights } => {
                let parts: Vec<f64> = weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(k, &w)| simpson(edges[k], edges[k + 1], w))
                    .collect();
                pairwise_sum(&parts)
            }
            Density::Discrete { atoms, weights } => {
                pairwise_sum(&atoms.iter().zip(weights).map(|(a, w)| w * f(a)).collect::<Vec<_>>())
            }
        }
    }
}

fn pick(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc && w > 0.0 {
            return k;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Poisson process with intensity measure `mass · density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoisson")]
pub struct PoissonModel {
    pub mass: f64,
    pub density: Density,
}

#[derive(Deserialize)]
struct RawPoisson {
    mass: f64,
    density: Density,
}

impl TryFrom<RawPoisson> for PoissonModel {
    type Error = Error;
    fn try_from(r: RawPoisson) -> Result<Self> {
        PoissonModel::new(r.mass, r.density)
    }
}

impl PoissonModel {
    pub fn new(mass: f64, density: Density) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::NonPositiveMass(mass));
        }
        density.validate()?;
        Ok(PoissonModel { mass, density })
    }

    /// Unit-mass Poisson process on `U[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::new(1.0, Density::uniform(a, b)?)
    }

    /// The intensity as an atomic measure of total mass `λ`.
    pub fn intensity_measure(&self, m: usize) -> Result<DiscreteMeasure> {
        self.density.to_measure(m)?.scaled(self.mass)
    }
}

/// Exactly `n` independent atoms drawn from `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBinomial")]
pub struct BinomialModel {
    pub n: usize,
    pub density: Density,
}

#[derive(Deserialize)]
struct RawBinomial {
    n: usize,
    density: Density,
}

impl TryFrom<RawBinomial> for BinomialModel {
    type Error = Error;
    fn try_from(r: RawBinomial) -> Result<Self> {
        BinomialModel::new(r.n, r.density)
    }
}

impl BinomialModel {
    pub fn new(n: usize, density: Density) -> Result<Self> {
        density.validate()?;
        Ok(BinomialModel { n, density })
    }
}

/// One mixture component of a single Cox process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedIntensity {
    pub weight: f64,
    pub intensity: PoissonModel,
}

/// The point-process models understood by the samplers and by [`count_pmf`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProcessModel {
    Poisson(PoissonModel),
    Binomial(BinomialModel),
    /// Cox process whose intensity is one of finitely many choices.
    CoxMixture { components: Vec<WeightedIntensity> },
}

impl ProcessModel {
    pub fn dim(&self) -> usize {
        match self {
            ProcessModel::Poisson(p) => p.density.dim(),
            ProcessModel::Binomial(b) => b.density.dim(),
            ProcessModel::CoxMixture { components } => components.first().map_or(1, |c| c.intensity.density.dim()),
        }
    }
}

/// Source of jointly distributed intensity pairs `(σ₁, σ₂)` for a pair of
/// Cox processes. Correlation between the two is up to the implementation.
pub trait IntensityPairSampler: Send + Sync + Debug {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<(PoissonModel, PoissonModel)>;

    /// The finite mixture behind this sampler, if it is one.
    fn as_mixture(&self) -> Option<&CoxMixture> {
        None
    }
}

/// A pair of intensities drawn with probability `weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxComponent {
    pub weight: f64,
    pub first: PoissonModel,
    pub second: PoissonModel,
}

/// Finite mixture over intensity pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMixture")]
pub struct CoxMixture {
    components: Vec<CoxComponent>,
}

#[derive(Deserialize)]
struct RawMixture {
    components: Vec<CoxComponent>,
}

impl TryFrom<RawMixture> for CoxMixture {
    type Error = Error;
    fn try_from(r: RawMixture) -> Result<Self> {
        CoxMixture::new(r.components)
    }
}

impl CoxMixture {
    pub fn new(components: Vec<CoxComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Sampler("mixture has no components".into()));
        }
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        if let Some((index, &value)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeight { index, value });
        }
        let total = pairwise_sum(&weights);
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Sampler(format!("mixture weights sum to {total}")));
        }
        Ok(CoxMixture { components })
    }

    pub fn components(&self) -> &[CoxComponent] {
        &self.components
    }

    /// Marginal law of the first (`second = false`) or second process.
    pub fn marginal(&self, second: bool) -> ProcessModel {
        ProcessModel::CoxMixture {
            components: self
                .components
                .iter()
                .map(|c| WeightedIntensity {
                    weight: c.weight,
                    intensity: if second { c.second.clone() } else { c.first.clone() },
                })
                .collect(),
        }
    }
}

impl IntensityPairSampler for CoxMixture {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<(PoissonModel, PoissonModel)> {
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        let c = &self.components[pick(&weights, rng.random::<f64>())];
        Ok((c.first.clone(), c.second.clone()))
    }

    fn as_mixture(&self) -> Option<&CoxMixture> {
        Some(self)
    }
}

/// A pair of Cox processes driven by a joint intensity sampler.
#[derive(Debug, Clone)]
pub struct CoxModel {
    sampler: Arc<dyn IntensityPairSampler>,
}

impl CoxModel {
    pub fn new(sampler: Arc<dyn IntensityPairSampler>) -> Self {
        CoxModel { sampler }
    }

    pub fn mixture(mixture: CoxMixture) -> Self {
        Self::new(Arc::new(mixture))
    }

    /// Always emits the same pair: two plain Poisson processes.
    pub fn degenerate(first: PoissonModel, second: PoissonModel) -> Self {
        Self::mixture(CoxMixture { components: vec![CoxComponent { weight: 1.0, first, second }] })
    }

    pub fn sampler(&self) -> &dyn IntensityPairSampler {
        self.sampler.as_ref()
    }

    pub fn draw_intensities(&self, rng: &mut ChaCha8Rng) -> Result<(PoissonModel, PoissonModel)> {
        let (a, b) = self.sampler.draw(rng)?;
        a.density.validate().map_err(|e| Error::Sampler(e.to_string()))?;
        b.density.validate().map_err(|e| Error::Sampler(e.to_string()))?;
        Ok((a, b))
    }
}

/// One joint draw from a [`CoxModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoxDraw {
    pub first: Configuration,
    pub second: Configuration,
    pub first_intensity: PoissonModel,
    pub second_intensity: PoissonModel,
}

pub fn sample_poisson(model: &PoissonModel, seed: u64) -> Result<Configuration> {
    sample_poisson_with(model, &mut stream_rng(seed, 0))
}

pub fn sample_poisson_with<R: Rng + ?Sized>(model: &PoissonModel, rng: &mut R) -> Result<Configuration> {
    if !(model.mass > 0.0) {
        return Err(Error::NonPositiveMass(model.mass));
    }
    let n = Poisson::new(model.mass).map_err(|e| Error::Sampler(e.to_string()))?.sample(rng) as usize;
    sample_points(&model.density, n, rng)
}

pub fn sample_binomial(model: &BinomialModel, seed: u64) -> Result<Configuration> {
    sample_binomial_with(model, &mut stream_rng(seed, 0))
}

pub fn sample_binomial_with<R: Rng + ?Sized>(model: &BinomialModel, rng: &mut R) -> Result<Configuration> {
    model.density.validate()?;
    sample_points(&model.density, model.n, rng)
}

/// `n` independent atoms from `density`.
pub fn sample_points<R: Rng + ?Sized>(density: &Density, n: usize, rng: &mut R) -> Result<Configuration> {
    Configuration::new((0..n).map(|_| density.sample_point(rng)).collect())
}

/// Draws `(σ₁, σ₂)`, then independent Poisson configurations with those
/// intensities.
pub fn sample_cox(model: &CoxModel, seed: u64) -> Result<CoxDraw> {
    sample_cox_with(model, &mut stream_rng(seed, 0))
}

pub fn sample_cox_with(model: &CoxModel, rng: &mut ChaCha8Rng) -> Result<CoxDraw> {
    let (first_intensity, second_intensity) = model.draw_intensities(rng)?;
    let first = sample_poisson_with(&first_intensity, rng)?;
    let second = sample_poisson_with(&second_intensity, rng)?;
    Ok(CoxDraw { first, second, first_intensity, second_intensity })
}

/// One configuration from any [`ProcessModel`].
pub fn sample_process_with<R: Rng + ?Sized>(model: &ProcessModel, rng: &mut R) -> Result<Configuration> {
    match model {
        ProcessModel::Poisson(p) => sample_poisson_with(p, rng),
        ProcessModel::Binomial(b) => sample_binomial_with(b, rng),
        ProcessModel::CoxMixture { components } => {
            let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
            let k = pick(&weights, rng.random::<f64>());
            sample_poisson_with(&components[k].intensity, rng)
        }
    }
}

/// `count` configurations, the `i`-th drawn from stream `(seed, i)`.
pub fn sample_many(model: &ProcessModel, count: usize, seed: u64) -> Result<Vec<Configuration>> {
    (0..count).map(|i| sample_process_with(model, &mut stream_rng(seed, i as u64))).collect()
}

/// Law of the number of atoms, truncated at `nmax`.
pub fn count_pmf(model: &ProcessModel, nmax: usize) -> Result<CountDistribution> {
    match model {
        ProcessModel::Poisson(p) => CountDistribution::poisson(p.mass, nmax),
        ProcessModel::Binomial(b) => Ok(CountDistribution::point_mass(b.n, nmax)),
        ProcessModel::CoxMixture { components } => {
            if components.is_empty() {
                return Err(Error::UnsupportedModel("empty Cox mixture".into()));
            }
            let parts = components
                .iter()
                .map(|c| Ok((c.weight, CountDistribution::poisson(c.intensity.mass, nmax)?)))
                .collect::<Result<Vec<_>>>()?;
            CountDistribution::mixture(&parts)
        }
    }
}
