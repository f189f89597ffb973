use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::field::ScalarField;

/// Time-dependent body force `g(t)` acting on the vorticity.
#[derive(Clone)]
pub struct Forcing {
    eval: Arc<dyn Fn(f64) -> ScalarField + Send + Sync>,
    steady: bool,
}

impl Forcing {
    pub fn new(f: impl Fn(f64) -> ScalarField + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            steady: false,
        }
    }

    /// Time-independent forcing.
    pub fn steady(g: ScalarField) -> Self {
        Self {
            eval: Arc::new(move |_| g.clone()),
            steady: true,
        }
    }

    pub fn at(&self, t: f64) -> ScalarField {
        (self.eval)(t)
    }

    pub fn is_steady(&self) -> bool {
        self.steady
    }
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Forcing").field("steady", &self.steady).finish_non_exhaustive()
    }
}

/// Parameters of one vorticity run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub nu: f64,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: Option<Forcing>,
    pub dealias: bool,
    pub snapshot_stride: usize,
}

impl SimulationConfig {
    /// Unforced, dealiased run storing every step.
    pub fn new(nu: f64, dt: f64, t_end: f64) -> Self {
        Self {
            nu,
            dt,
            t_end,
            forcing: None,
            dealias: true,
            snapshot_stride: 1,
        }
    }

    pub fn with_forcing(mut self, g: Forcing) -> Self {
        self.forcing = Some(g);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        Ok((self.t_end / self.dt).round() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(invalid("nu", format!("viscosity must be finite and >= 0, got {}", self.nu)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid("dt", format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid("t_end", format!("horizon must be >= 0, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride", "stride must be at least 1"));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(invalid(
                "dt",
                format!("horizon {} is not a multiple of dt = {}", self.t_end, self.dt),
            ));
        }
        Ok(())
    }
}
