/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two disjoint sample sets (Chan et al.).
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Mean, variance and standard error at one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimate {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

impl From<&RunningStats> for PointEstimate {
    fn from(s: &RunningStats) -> Self {
        Self {
            mean: s.mean(),
            variance: s.variance(),
            std_error: s.std_error(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn merge_matches_sequential(xs in proptest::collection::vec(-100.0f64..100.0, 2..200), cut in 0usize..200) {
            let cut = cut.min(xs.len());
            let mut all = RunningStats::default();
            xs.iter().for_each(|&x| all.push(x));
            let mut a = RunningStats::default();
            let mut b = RunningStats::default();
            xs[..cut].iter().for_each(|&x| a.push(x));
            xs[cut..].iter().for_each(|&x| b.push(x));
            a.merge(&b);
            prop_assert_eq!(a.count(), all.count());
            prop_assert!((a.mean() - all.mean()).abs() < 1e-9);
            prop_assert!((a.variance() - all.variance()).abs() < 1e-7 * (1.0 + all.variance()));
        }
    }

    #[test]
    fn known_variance() {
        let mut s = RunningStats::default();
        [1.0, 2.0, 3.0, 4.0].iter().for_each(|&x| s.push(x));
        assert!((s.mean() - 2.5).abs() < 1e-15);
        assert!((s.variance() - 5.0 / 3.0).abs() < 1e-15);
    }
}
