use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Sorted node values of a field, each carrying weight `1/n²`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Builds from raw samples; NaNs sort last.
    pub fn from_samples(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `∫ f dπ`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.sorted.iter().map(|&y| f(y)).sum::<f64>() / self.sorted.len() as f64
    }

    /// `π((−∞, y])`.
    pub fn cdf(&self, y: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= y) as f64 / self.sorted.len() as f64
    }

    /// Left-continuous quantile, `q ∈ [0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let i = ((q.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[i]
    }

    /// Counts in `bins` equal bins over `[lo, hi]`; values outside are dropped.
    pub fn histogram(&self, bins: usize, lo: f64, hi: f64) -> Vec<usize> {
        let mut counts = vec![0; bins];
        let w = (hi - lo) / bins as f64;
        for &y in &self.sorted {
            if y < lo || y > hi {
                continue;
            }
            let b = (((y - lo) / w) as usize).min(bins - 1);
            counts[b] += 1;
        }
        counts
    }
}

/// Distribution of the node values of `f`.
pub fn distribution(f: &ScalarField) -> EmpiricalDistribution {
    EmpiricalDistribution::from_samples(f.values().to_vec())
}

/// Exact 1D optimal-transport distance between equal-size uniform samples.
pub fn wasserstein1(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch(a.len(), b.len()));
    }
    let s: f64 = a.sorted.iter().zip(&b.sorted).map(|(x, y)| (x - y).abs()).sum();
    Ok(s / a.len() as f64)
}
