//! Time-indexed velocity snapshots used by linear transport and particle tracking.

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::grid::GridSpec;
use crate::interp::Stencil;
use crate::spectral;

const SOLENOIDAL_TOL: f64 = 1e-10;

/// Ordered velocity snapshots; bicubic in space, linear in time.
#[derive(Debug, Clone)]
pub struct VelocityArchive {
    grid: GridSpec,
    times: Vec<f64>,
    fields: Vec<VectorField>,
    max_spacing: f64,
    nu: Option<f64>,
    forced: bool,
}

impl VelocityArchive {
    /// Validates ordering, spacing and discrete incompressibility.
    pub fn new(times: Vec<f64>, fields: Vec<VectorField>, max_spacing: f64) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::SizeMismatch(times.len(), fields.len()));
        }
        let grid = fields[0].grid();
        for w in times.windows(2) {
            let gap = w[1] - w[0];
            if gap <= 0.0 {
                return Err(crate::error::invalid("times", "snapshot times must increase strictly"));
            }
            if gap > max_spacing * (1.0 + 1e-9) {
                return Err(Error::ArchiveGap { gap, max: max_spacing });
            }
        }
        for (t, u) in times.iter().zip(&fields) {
            if u.grid() != grid {
                return Err(Error::GridMismatch {
                    expected: grid.n(),
                    found: u.grid().n(),
                });
            }
            let div = spectral::divergence(u).max_abs();
            if div > SOLENOIDAL_TOL * u.max_norm().max(f64::MIN_POSITIVE) {
                return Err(Error::NotSolenoidal { t: *t, div });
            }
        }
        Ok(Self {
            grid,
            times,
            fields,
            max_spacing,
            nu: None,
            forced: false,
        })
    }

    /// Time-independent archive over `[0, t_end]`.
    pub fn steady(u: VectorField, t_end: f64, spacing: f64) -> Result<Self> {
        let steps = ((t_end / spacing).ceil() as usize).max(1);
        let times: Vec<f64> = (0..=steps).map(|i| t_end * i as f64 / steps as f64).collect();
        let fields = vec![u; times.len()];
        Self::new(times, fields, spacing)
    }

    pub fn zeros(grid: GridSpec, t_end: f64, spacing: f64) -> Result<Self> {
        Self::steady(VectorField::zeros(grid), t_end, spacing)
    }

    /// Records the viscosity and forcing of the run that produced the archive.
    pub fn with_provenance(mut self, nu: f64, forced: bool) -> Self {
        self.nu = Some(nu);
        self.forced = forced;
        self
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn max_spacing(&self) -> f64 {
        self.max_spacing
    }

    pub fn nu(&self) -> Option<f64> {
        self.nu
    }

    pub fn forced(&self) -> bool {
        self.forced
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("nonempty"))
    }

    pub fn check_coverage(&self, t0: f64, t1: f64) -> Result<()> {
        let (start, end) = self.span();
        let slack = 1e-9 * (1.0 + end.abs());
        for t in [t0, t1] {
            if t < start - slack || t > end + slack {
                return Err(Error::Coverage { t, start, end });
            }
        }
        Ok(())
    }

    /// Index `i` and weight `w` with `t ≈ (1 − w)·tᵢ + w·tᵢ₊₁`, clamped to the span.
    #[inline]
    pub fn bracket(&self, t: f64) -> (usize, f64) {
        let last = self.times.len() - 1;
        if last == 0 || t <= self.times[0] {
            return (0, 0.0);
        }
        if t >= self.times[last] {
            return (last.saturating_sub(1), if last == 0 { 0.0 } else { 1.0 });
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        (i, w)
    }

    /// Grid velocity at time `t`.
    pub fn field_at(&self, t: f64) -> Result<VectorField> {
        self.check_coverage(t, t)?;
        let (i, w) = self.bracket(t);
        if w == 0.0 || self.fields.len() == 1 {
            return Ok(self.fields[i].clone());
        }
        Ok(self.fields[i].lerp(&self.fields[i + 1], w))
    }

    /// Off-grid velocity at `(p, t)`; `t` is clamped to the archive span.
    #[inline]
    pub fn sample(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        let n = self.grid.n();
        let st = Stencil::new(self.grid, p);
        let (i, w) = self.bracket(t);
        let a = &self.fields[i];
        let ua = [st.apply(a.x.values(), n), st.apply(a.y.values(), n)];
        if w == 0.0 || self.fields.len() == 1 {
            return ua;
        }
        let b = &self.fields[i + 1];
        let ub = [st.apply(b.x.values(), n), st.apply(b.y.values(), n)];
        [ua[0] + w * (ub[0] - ua[0]), ua[1] + w * (ub[1] - ua[1])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;

    fn tg(g: GridSpec) -> VectorField {
        spectral::biot_savart(&ScalarField::from_fn(g, |x, y| x.cos() * y.cos())).unwrap()
    }

    #[test]
    fn rejects_gaps_and_compressible_fields() {
        let g = GridSpec::new(32).unwrap();
        let u = tg(g);
        assert!(matches!(
            VelocityArchive::new(vec![0.0, 0.5], vec![u.clone(), u.clone()], 0.1),
            Err(Error::ArchiveGap { .. })
        ));
        let compressible = VectorField::from_fn(g, |x, _| [x.sin(), 0.0]);
        assert!(matches!(
            VelocityArchive::new(vec![0.0], vec![compressible], 0.1),
            Err(Error::NotSolenoidal { .. })
        ));
    }

    #[test]
    fn linear_time_interpolation() {
        let g = GridSpec::new(32).unwrap();
        let u = tg(g);
        let a = VelocityArchive::new(vec![0.0, 1.0], vec![VectorField::zeros(g), u.clone()], 1.0).unwrap();
        let mid = a.field_at(0.25).unwrap();
        assert!(mid.sub(&u.scaled(0.25)).max_norm() < 1e-15);
        assert!(a.field_at(1.5).is_err());
        let p = [1.0, 2.0];
        let s = a.sample(p, 0.5);
        let exact = [-0.25 * 1f64.cos() * 2f64.sin(), 0.25 * 1f64.sin() * 2f64.cos()];
        assert!((s[0] - exact[0]).abs() < 1e-4 && (s[1] - exact[1]).abs() < 1e-4);
    }
}
