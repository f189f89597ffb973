use super::trajectory::Trajectory;
use crate::diagnostics::lp_norm;
use crate::error::{invalid, Result};

/// Lebesgue norms along the shrinking exponent schedule `p(t) = βp₀/(β + 2p₀t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedNorm {
    pub p0: f64,
    pub beta: f64,
    /// Time at which `p(t)` reaches 1.
    pub t_star: f64,
    /// `(t, p(t), ‖θ(t)‖_{2p(t)})` for every snapshot with `t ≤ t*`.
    pub samples: Vec<(f64, f64, f64)>,
}

impl TrackedNorm {
    pub fn max_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.2).fold(0.0, f64::max)
    }
}

/// Exponent schedule `p(t)`.
pub fn exponent_schedule(p0: f64, beta: f64, t: f64) -> f64 {
    beta * p0 / (beta + 2.0 * p0 * t)
}

/// Evaluates `‖θ(t)‖_{2p(t)}` on the stored snapshots up to `t*`.
pub fn ptracked_norm(traj: &Trajectory, p0: f64, beta: f64) -> Result<TrackedNorm> {
    if !(p0 > 1.0) {
        return Err(invalid("p0", format!("initial exponent must exceed 1, got {p0}")));
    }
    if !(beta > 0.0) {
        return Err(invalid("beta", format!("time scale must be positive, got {beta}")));
    }
    let t_star = beta * (p0 - 1.0) / (2.0 * p0);
    let samples = traj
        .iter()
        .filter(|(t, _)| *t <= t_star * (1.0 + 1e-12))
        .map(|(t, f)| {
            let p = exponent_schedule(p0, beta, t);
            lp_norm(f, 2.0 * p).map(|v| (t, p, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrackedNorm {
        p0,
        beta,
        t_star,
        samples,
    })
}

/// Slack in `ab ≤ eᵃ + b ln b − b` (the Legendre pair of `eᵃ`); never negative.
pub fn exp_entropy_gap(a: f64, b: f64) -> f64 {
    let entropy = if b == 0.0 { 0.0 } else { b * b.ln() };
    a.exp() + entropy - b - a * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn schedule_hits_one_at_t_star() {
        assert!((exponent_schedule(2.0, 1.0, 0.25) - 1.0).abs() < 1e-15);
        assert!((exponent_schedule(2.0, 1.0, 0.1) - 2.0 / 1.4).abs() < 1e-15);
    }

    #[test]
    fn entropy_gap_is_nonnegative_on_a_million_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = f64::INFINITY;
        for _ in 0..1_000_000 {
            let a = rng.random_range(-10.0..=10.0);
            let b = 1e3 * (1.0 - rng.random::<f64>());
            let gap = exp_entropy_gap(a, b);
            // relative slack: the terms reach ~1e4 in magnitude
            let scale = a.exp() + (b * b.ln()).abs() + b + (a * b).abs();
            worst = worst.min(gap / scale);
        }
        assert!(worst >= -1e-14, "worst relative gap {worst}");
    }

    #[test]
    fn equality_on_the_legendre_curve() {
        // equality holds exactly when b = eᵃ
        for a in [-3.0, 0.0, 1.5, 4.0] {
            assert!(exp_entropy_gap(a, f64::exp(a)).abs() < 1e-10 * f64::exp(a).max(1.0));
        }
    }
}
