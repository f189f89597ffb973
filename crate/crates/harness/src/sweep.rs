//! Viscosity-ladder orchestration, resolution guard and fitted surrogates
//! for the constants that only appear as shapes in the estimates.

use std::fmt;

use rayon::prelude::*;
use yudovich::diagnostics::{besov_index, lp_distance};
use yudovich::dynamics::{evolve, SimulationConfig, Trajectory};
use yudovich::grid::GridSpec;
use yudovich::spectral::biot_savart;
use yudovich::ScalarField;

use crate::error::{HarnessError, Result};
use crate::rate::least_squares;
use crate::spec::ExperimentSpec;

/// Largest relative change of a headline quantity under `n → 2n`.
pub const GUARD_TOLERANCE: f64 = 0.1;

/// Courant number above which the refined run halves its step.
const GUARD_COURANT: f64 = 0.3;

/// Time grid shared by all members of a ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepping {
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
}

impl Stepping {
    pub fn of(spec: &ExperimentSpec) -> Self {
        Self {
            dt: spec.dt,
            t_end: spec.t_end,
            stride: spec.stride,
        }
    }

    pub fn config(&self, nu: f64) -> SimulationConfig {
        SimulationConfig::new(nu, self.dt, self.t_end).with_stride(self.stride)
    }
}

/// Runs every viscosity as an isolated job; output order follows `nus`.
pub fn run_ladder(omega0: &ScalarField, nus: &[f64], stepping: Stepping) -> Result<Vec<Trajectory>> {
    nus.par_iter()
        .map(|&nu| evolve(omega0, &stepping.config(nu)).map_err(HarnessError::from))
        .collect()
}

/// `sup_t ‖a(t) − b(t)‖_p` over the shared snapshot times.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, p: f64) -> Result<f64> {
    sup_distance_until(a, b, p, f64::INFINITY)
}

/// As [`sup_distance`], restricted to snapshot times `≤ t_max`.
pub fn sup_distance_until(a: &Trajectory, b: &Trajectory, p: f64, t_max: f64) -> Result<f64> {
    if a.times() != b.times() {
        return Err(HarnessError::Core(yudovich::Error::SizeMismatch(a.len(), b.len())));
    }
    let mut worst: f64 = 0.0;
    for ((t, x), y) in a.iter().zip(b.snapshots()) {
        if t <= t_max * (1.0 + 1e-12) {
            worst = worst.max(lp_distance(x, y, p)?);
        }
    }
    Ok(worst)
}

/// Outcome of re-running a headline quantity at twice the resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardReport {
    pub quantity: String,
    pub n_coarse: usize,
    pub n_fine: usize,
    pub dt_fine: f64,
    pub coarse: f64,
    pub fine: f64,
}

impl GuardReport {
    pub fn relative_change(&self) -> f64 {
        (self.fine - self.coarse).abs() / self.coarse.abs().max(f64::MIN_POSITIVE)
    }

    pub fn passed(&self) -> bool {
        self.relative_change() <= GUARD_TOLERANCE
    }
}

impl fmt::Display for GuardReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {:.6e} at n = {}, {:.6e} at n = {} (dt = {:e}); relative change {:.3e} vs tolerance {}",
            self.quantity,
            self.coarse,
            self.n_coarse,
            self.fine,
            self.n_fine,
            self.dt_fine,
            self.relative_change(),
            GUARD_TOLERANCE
        )
    }
}

/// Refined setting for the guard: the datum zero-padded to `2n`, with the
/// step halved (and the stride doubled) when the Courant number would exceed
/// [`GUARD_COURANT`].
pub fn refined(spec: &ExperimentSpec, omega0: &ScalarField) -> Result<(ScalarField, Stepping)> {
    let fine = GridSpec::new(2 * spec.n)?;
    let w = yudovich::spectral::resample(omega0, fine);
    let umax = biot_savart(&w)?.max_norm();
    let mut stepping = Stepping::of(spec);
    if umax * stepping.dt / fine.dx() > GUARD_COURANT {
        stepping.dt *= 0.5;
        stepping.stride *= 2;
    }
    Ok((w, stepping))
}

/// Compares `coarse` with `fine_eval` on the refined setting; an excessive
/// change aborts the experiment with the report.
pub fn resolution_guard(
    spec: &ExperimentSpec,
    omega0: &ScalarField,
    quantity: &str,
    coarse: f64,
    fine_eval: impl FnOnce(&ScalarField, Stepping) -> Result<f64>,
) -> Result<GuardReport> {
    let (w, stepping) = refined(spec, omega0)?;
    let fine = fine_eval(&w, stepping)?;
    let report = GuardReport {
        quantity: quantity.to_string(),
        n_coarse: spec.n,
        n_fine: 2 * spec.n,
        dt_fine: stepping.dt,
        coarse,
        fine,
    };
    if report.passed() {
        Ok(report)
    } else {
        Err(HarnessError::Resolution(report))
    }
}

/// Empirical surrogate for the regularity-loss constant: the measured Besov
/// index `s(t)` of an inviscid run is fitted to `s₀·exp(−Ĉ t ‖ω₀‖_∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityDecay {
    pub s0: f64,
    pub c_hat: f64,
    pub omega_inf: f64,
    pub r_squared: f64,
}

impl RegularityDecay {
    /// `s·exp(−Ĉ t ‖ω₀‖_∞)`.
    pub fn target(&self, s: f64, t: f64) -> f64 {
        s * (-self.c_hat * t * self.omega_inf).exp()
    }
}

pub fn fit_regularity_decay(reference: &Trajectory) -> Result<RegularityDecay> {
    let omega_inf = reference.initial().max_abs();
    let mut ts = Vec::new();
    let mut ls = Vec::new();
    // snapshots without enough resolved blocks carry no index and are skipped
    for (t, f) in reference.iter() {
        if let Ok(idx) = besov_index(f, 2.0) {
            if idx.index > 0.0 {
                ts.push(t * omega_inf);
                ls.push(idx.index.ln());
            }
        }
    }
    let s0 = besov_index(reference.initial(), 2.0).map_or(f64::NAN, |i| i.index);
    if ts.len() < 2 {
        return Ok(RegularityDecay {
            s0,
            c_hat: 0.0,
            omega_inf,
            r_squared: 0.0,
        });
    }
    let fit = least_squares(&ts, &ls)?;
    Ok(RegularityDecay {
        s0,
        c_hat: (-fit.slope).max(0.0),
        omega_inf,
        r_squared: fit.r_squared,
    })
}

/// Rate exponent of the convergence estimate for `B^s_{p,∞}` data:
/// `s e^{−2CTΩ} / (p(1 + s e^{−CTΩ}))`.
pub fn rate_exponent(s: f64, c: f64, t: f64, omega_inf: f64, p: f64) -> f64 {
    let e = (-c * t * omega_inf).exp();
    s * e * e / (p * (1.0 + s * e))
}
