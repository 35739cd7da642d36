//! Wasserstein distances between laws of finite point processes.
//!
//! Configurations (finite point sets in `R^k`) are compared with the cost
//! `c(η, ω)`: the cheapest matching of atoms under `½‖x − y‖²` when both have
//! the same number of atoms, `+∞` otherwise. The crate computes that cost
//! exactly, solves discrete and one-dimensional transport problems, samples
//! Poisson, binomial, and Cox processes reproducibly, and evaluates
//! process-level distances together with the closed-form identities they
//! satisfy in the Poisson case.
//!
//! Module map:
//! - [`point`], [`cost`], [`measure`]: points, configurations, extended costs,
//!   discrete measures, count laws.
//! - [`matching`]: configuration cost, brute-force oracle, cyclical
//!   monotonicity.
//! - [`ot`]: exact discrete transport with dual certificates, quantile
//!   transport on the line, lifted maps and potentials.
//! - [`processes`]: models, samplers, count laws.
//! - [`distance`]: count gate, count decomposition, Poisson/Cox/normalized
//!   distances, empirical estimator, shift bound.
//! - [`cli`]: report-producing runner behind the `config-ot` binary.

pub mod cli;
pub mod cost;
pub mod distance;
mod error;
pub mod matching;
pub mod measure;
pub mod ot;
pub mod point;
pub mod processes;
pub mod stats;

pub use cost::ExtendedCost;
pub use error::{Error, Result};
pub use measure::{CountDistribution, DiscreteMeasure};
pub use point::{half_sq_dist, validate_configuration, Configuration, Point};
