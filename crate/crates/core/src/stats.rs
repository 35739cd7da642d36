//! Summation and Monte-Carlo summaries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation. The result depends only on the order of
/// `values`, never on how they were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Independent random stream number `index` derived from `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let m = values.len();
        if m == 0 {
            return McEstimate { mean: f64::NAN, std_error: f64::NAN, samples: 0 };
        }
        // constant samples are exact; summation would leave rounding residue
        if values.iter().all(|v| *v == values[0]) {
            return McEstimate { mean: values[0], std_error: 0.0, samples: m };
        }
        let mean = pairwise_sum(values) / m as f64;
        let std_error = if m > 1 {
            let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&sq) / (m - 1) as f64 / m as f64).sqrt()
        } else {
            0.0
        };
        McEstimate { mean, std_error, samples: m }
    }

    /// `|mean − target| ≤ z · std_error`.
    pub fn within(&self, target: f64, z: f64) -> bool {
        (self.mean - target).abs() <= z * self.std_error
    }
}

/// Running mean and standard error after each prefix, for trace export.
pub fn running_summary(values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(values.len());
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let k = (i + 1) as f64;
        let delta = v - mean;
        mean += delta / k;
        m2 += delta * (v - mean);
        let se = if i > 0 { (m2 / (k - 1.0) / k).sqrt() } else { 0.0 };
        out.push((mean, se));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn pairwise_matches_naive_on_small_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 3).random();
        let b: u64 = stream_rng(7, 3).random();
        let c: u64 = stream_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn estimate_of_constant_has_zero_error() {
        let e = McEstimate::from_values(&[0.5; 10]);
        assert_eq!(e.mean, 0.5);
        assert_eq!(e.std_error, 0.0);
        assert!(e.within(0.5, 3.0));
    }

    #[test]
    fn running_summary_final_matches_estimate() {
        let v = [1.0, 2.0, 4.0, 8.0];
        let e = McEstimate::from_values(&v);
        let (m, se) = *running_summary(&v).last().unwrap();
        assert!((m - e.mean).abs() < 1e-12);
        assert!((se - e.std_error).abs() < 1e-12);
    }
}
