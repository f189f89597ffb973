use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::archive::VelocityArchive;
use crate::error::{invalid, Result};
use crate::grid::wrap;

/// Anything that can be sampled for a velocity at an arbitrary point and time.
pub trait VelocitySource: Sync {
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2];

    /// Fails if `[t0, t1]` is not covered.
    fn check_coverage(&self, t0: f64, t1: f64) -> Result<()>;
}

impl VelocitySource for VelocityArchive {
    #[inline]
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        self.sample(p, t)
    }

    fn check_coverage(&self, t0: f64, t1: f64) -> Result<()> {
        VelocityArchive::check_coverage(self, t0, t1)
    }
}

/// Closed-form velocity, defined for all times.
pub struct AnalyticVelocity<F>(pub F);

impl<F: Fn([f64; 2], f64) -> [f64; 2] + Sync> VelocitySource for AnalyticVelocity<F> {
    #[inline]
    fn velocity(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        (self.0)(p, t)
    }

    fn check_coverage(&self, _: f64, _: f64) -> Result<()> {
        Ok(())
    }
}

/// Time-stepping rule for the additive-noise flow equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    EulerMaruyama,
    /// Stochastic Heun (predictor–corrector); second order when the noise is additive.
    #[default]
    Heun,
}

/// Parameters shared by all flow-map computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub nu: f64,
    pub realizations: usize,
    pub dt: f64,
    pub t: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl FlowParams {
    pub fn new(nu: f64, realizations: usize, dt: f64, t: f64, seed: u64) -> Self {
        Self {
            nu,
            realizations,
            dt,
            t,
            seed,
            scheme: Scheme::default(),
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub(crate) fn steps(&self) -> Result<usize> {
        if !(self.dt > 0.0) {
            return Err(invalid("dt", format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t >= 0.0) {
            return Err(invalid("t", format!("horizon must be >= 0, got {}", self.t)));
        }
        if !(self.nu >= 0.0) {
            return Err(invalid("nu", format!("viscosity must be >= 0, got {}", self.nu)));
        }
        if self.realizations == 0 {
            return Err(invalid("realizations", "need at least one realization"));
        }
        let s = self.t / self.dt;
        if (s - s.round()).abs() > 1e-6 * s.max(1.0) {
            return Err(invalid("dt", format!("horizon {} is not a multiple of dt = {}", self.t, self.dt)));
        }
        Ok(s.round() as usize)
    }
}

/// Noise generator of realization `r`: one stream per realization of the top seed.
pub(crate) fn realization_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// Direction of integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `dX = u(X, s)ds + √(2ν)dW`.
    Forward,
    /// `dY = −u(Y, t − s)ds + √(2ν)dŴ`.
    Backward,
}

/// Integrates one realization for all `points` (unwrapped coordinates),
/// calling `observe(step, points)` after every step.
pub(crate) fn integrate_realization<S: VelocitySource + ?Sized>(
    source: &S,
    points: &mut [[f64; 2]],
    params: &FlowParams,
    steps: usize,
    direction: Direction,
    realization: usize,
    mut observe: impl FnMut(usize, &[[f64; 2]]),
) {
    let mut rng = realization_rng(params.seed, realization);
    let dt = params.dt;
    let sigma = (2.0 * params.nu * dt).sqrt();
    let backward = direction == Direction::Backward;
    let sign = if backward { -1.0 } else { 1.0 };
    let time_of = |s: f64| if backward { params.t - s } else { s };
    for step in 0..steps {
        let s0 = step as f64 * dt;
        let s1 = s0 + dt;
        let z: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
        let dw = [sigma * z[0], sigma * z[1]];
        let (ta, tb) = (time_of(s0), time_of(s1));
        for p in points.iter_mut() {
            let ua = source.velocity(*p, ta);
            match params.scheme {
                Scheme::EulerMaruyama => {
                    p[0] += sign * ua[0] * dt + dw[0];
                    p[1] += sign * ua[1] * dt + dw[1];
                }
                Scheme::Heun => {
                    let pred = [p[0] + sign * ua[0] * dt + dw[0], p[1] + sign * ua[1] * dt + dw[1]];
                    let ub = source.velocity(pred, tb);
                    p[0] += sign * 0.5 * (ua[0] + ub[0]) * dt + dw[0];
                    p[1] += sign * 0.5 * (ua[1] + ub[1]) * dt + dw[1];
                }
            }
        }
        observe(step + 1, points);
    }
}

/// Final positions of labels over `M` realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub labels: Vec<[f64; 2]>,
    pub seed: u64,
    /// `unwrapped[r][i]`: position of label `i` in realization `r`, not wrapped.
    pub unwrapped: Vec<Vec<[f64; 2]>>,
}

impl ParticleEnsemble {
    pub fn realizations(&self) -> usize {
        self.unwrapped.len()
    }

    /// Positions wrapped into `[0, 2π)²`.
    pub fn positions(&self, r: usize) -> Vec<[f64; 2]> {
        self.unwrapped[r].iter().map(|p| [wrap(p[0]), wrap(p[1])]).collect()
    }

    /// Displacement of label `i` in realization `r`.
    pub fn displacement(&self, r: usize, i: usize) -> [f64; 2] {
        let p = self.unwrapped[r][i];
        let l = self.labels[i];
        [p[0] - l[0], p[1] - l[1]]
    }
}

fn run_ensemble<S: VelocitySource + ?Sized>(
    labels: &[[f64; 2]],
    source: &S,
    params: &FlowParams,
    direction: Direction,
) -> Result<ParticleEnsemble> {
    let steps = params.steps()?;
    source.check_coverage(0.0, params.t)?;
    let unwrapped = (0..params.realizations)
        .into_par_iter()
        .map(|r| {
            let mut pts = labels.to_vec();
            integrate_realization(source, &mut pts, params, steps, direction, r, |_, _| {});
            pts
        })
        .collect();
    Ok(ParticleEnsemble {
        labels: labels.to_vec(),
        seed: params.seed,
        unwrapped,
    })
}

/// Forward stochastic flow `X_t` of every label.
pub fn advect<S: VelocitySource + ?Sized>(
    labels: &[[f64; 2]],
    source: &S,
    params: &FlowParams,
) -> Result<ParticleEnsemble> {
    run_ensemble(labels, source, params, Direction::Forward)
}

/// Back-to-labels map `A_t` via the backward equation started at each point.
pub fn back_to_labels<S: VelocitySource + ?Sized>(
    points: &[[f64; 2]],
    source: &S,
    params: &FlowParams,
) -> Result<ParticleEnsemble> {
    run_ensemble(points, source, params, Direction::Backward)
}
