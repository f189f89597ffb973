use rustfft::num_complex::Complex64;

use super::config::{Forcing, SimulationConfig};
use super::trajectory::Trajectory;
use crate::archive::VelocityArchive;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::spectral::{mean_check, ops, SpectralOps, Spectrum};

const MAX_COURANT: f64 = 0.5;

/// Result of one nonlinear evaluation: tendency spectrum and the largest speed seen.
struct Tendency {
    coeffs: Vec<Complex64>,
    speed: f64,
}

/// `−û·∇θ` in spectral space for a physical velocity and a spectral scalar.
fn advection(ops: &SpectralOps, u: &VectorField, theta: &[Complex64], dealias: bool) -> Tendency {
    let (g1, g2) = ops.inverse_packed(ops.packed_gradient(theta));
    advection_from_parts(ops, u.x.values(), u.y.values(), g1.values(), g2.values(), dealias)
}

fn advection_from_parts(
    ops: &SpectralOps,
    u1: &[f64],
    u2: &[f64],
    g1: &[f64],
    g2: &[f64],
    dealias: bool,
) -> Tendency {
    let mut speed: f64 = 0.0;
    let mut finite = true;
    let prod: Vec<f64> = (0..u1.len())
        .map(|i| {
            let s2 = u1[i] * u1[i] + u2[i] * u2[i];
            finite &= s2.is_finite();
            speed = speed.max(s2);
            -(u1[i] * g1[i] + u2[i] * g2[i])
        })
        .collect();
    let mut coeffs = ops
        .forward(&ScalarField::new(ops.grid(), prod).expect("grid-sized buffer"))
        .into_coeffs();
    if dealias {
        ops.dealias_in_place(&mut coeffs);
    }
    coeffs[0] = Complex64::default();
    Tendency {
        coeffs,
        speed: if finite { speed.sqrt() } else { f64::NAN },
    }
}

fn vorticity_advection(ops: &SpectralOps, w: &[Complex64], dealias: bool) -> Tendency {
    let (u1, u2) = ops.inverse_packed(ops.packed_velocity(w));
    let (g1, g2) = ops.inverse_packed(ops.packed_gradient(w));
    advection_from_parts(ops, u1.values(), u2.values(), g1.values(), g2.values(), dealias)
}

/// Spectral forcing, cached when steady.
struct ForcingSpectrum<'a> {
    ops: &'a SpectralOps,
    forcing: Option<&'a Forcing>,
    cached: Option<Vec<Complex64>>,
}

impl<'a> ForcingSpectrum<'a> {
    fn new(ops: &'a SpectralOps, forcing: Option<&'a Forcing>) -> Result<Self> {
        let mut cached = None;
        if let Some(g) = forcing {
            let g0 = g.at(0.0);
            if g0.grid() != ops.grid() {
                return Err(Error::GridMismatch {
                    expected: ops.grid().n(),
                    found: g0.grid().n(),
                });
            }
            mean_check(&g0)?;
            if g.is_steady() {
                cached = Some(ops.forward(&g0).into_coeffs());
            }
        }
        Ok(Self {
            ops,
            forcing,
            cached,
        })
    }

    fn add_to(&self, out: &mut [Complex64], t: f64) {
        let Some(g) = self.forcing else { return };
        let owned;
        let coeffs = match &self.cached {
            Some(c) => c.as_slice(),
            None => {
                owned = self.ops.forward(&g.at(t)).into_coeffs();
                owned.as_slice()
            }
        };
        for (o, c) in out.iter_mut().zip(coeffs) {
            *o += c;
        }
        out[0] = Complex64::default();
    }

    fn sup_norm(&self, t: f64) -> f64 {
        self.forcing.map_or(0.0, |g| g.at(t).max_abs())
    }
}

/// One integrating-factor RK4 step with `e = exp(−ν|k|²dt/2)` per bin.
/// Returns the largest speed seen at the first stage.
fn if_rk4_step(
    w: &mut [Complex64],
    e: &[f64],
    t: f64,
    dt: f64,
    mut tendency: impl FnMut(&[Complex64], f64) -> Tendency,
) -> f64 {
    let h = 0.5 * dt;
    let a = tendency(w, t);
    let mut tmp: Vec<Complex64> = w
        .iter()
        .zip(&a.coeffs)
        .zip(e)
        .map(|((&w, &a), &e)| e * (w + h * a))
        .collect();
    let b = tendency(&tmp, t + h);
    for (((s, &w), &b), &e) in tmp.iter_mut().zip(w.iter()).zip(&b.coeffs).zip(e) {
        *s = e * w + h * b;
    }
    let c = tendency(&tmp, t + h);
    for (((s, &w), &c), &e) in tmp.iter_mut().zip(w.iter()).zip(&c.coeffs).zip(e) {
        *s = e * (e * w + dt * c);
    }
    let d = tendency(&tmp, t + dt);
    let sixth = dt / 6.0;
    for (i, wi) in w.iter_mut().enumerate() {
        let ei = e[i];
        let e2 = ei * ei;
        *wi = e2 * *wi
            + sixth * (e2 * a.coeffs[i] + 2.0 * ei * (b.coeffs[i] + c.coeffs[i]) + d.coeffs[i]);
    }
    a.speed
}

fn half_step_factors(ops: &SpectralOps, nu: f64, dt: f64) -> Vec<f64> {
    let n = ops.grid().n();
    let mut e = vec![1.0; n * n];
    for m1 in 0..n {
        let k1 = ops.k[m1];
        for m2 in 0..n {
            let k2 = ops.k[m2];
            e[m1 * n + m2] = (-nu * (k1 * k1 + k2 * k2) * 0.5 * dt).exp();
        }
    }
    e
}

/// `−u·∇ω + νΔω + g` with `u` the Biot–Savart velocity of `ω`.
pub fn rhs(omega: &ScalarField, nu: f64, g: &ScalarField) -> Result<ScalarField> {
    mean_check(omega)?;
    mean_check(g)?;
    if g.grid() != omega.grid() {
        return Err(Error::GridMismatch {
            expected: omega.grid().n(),
            found: g.grid().n(),
        });
    }
    let o = ops(omega.grid());
    let w = o.forward(omega);
    let mut out = vorticity_advection(&o, w.coeffs(), true).coeffs;
    let gh = o.forward(g);
    let n = o.grid().n();
    for m1 in 0..n {
        for m2 in 0..n {
            let i = m1 * n + m2;
            let kk = o.k[m1] * o.k[m1] + o.k[m2] * o.k[m2];
            out[i] += -nu * kk * w.coeffs()[i] + gh.coeffs()[i];
        }
    }
    out[0] = Complex64::default();
    Ok(o.inverse(&Spectrum::from_raw(omega.grid(), out)))
}

fn courant_check(speed: f64, dt: f64, dx: f64, step: usize) -> Result<()> {
    if !speed.is_finite() {
        return Err(Error::NotFinite { step });
    }
    let courant = dt * speed / dx;
    if courant > MAX_COURANT {
        return Err(Error::Cfl { step, courant });
    }
    Ok(())
}

/// Integrates the vorticity equation from `omega0` under `config`.
///
/// Diffusion is integrated exactly through the factor `exp(−ν|k|²t)`; the
/// advection and forcing terms use classical RK4 on top of it.
pub fn evolve(omega0: &ScalarField, config: &SimulationConfig) -> Result<Trajectory> {
    let steps = config.steps()?;
    mean_check(omega0)?;
    let grid = omega0.grid();
    let o = ops(grid);
    let forcing = ForcingSpectrum::new(&o, config.forcing.as_ref())?;
    let e = half_step_factors(&o, config.nu, config.dt);
    let dt = config.dt;
    let dx = grid.dx();

    let mut w = o.forward(omega0).into_coeffs();
    w[0] = Complex64::default();
    let mut traj = Trajectory::start(config.clone(), omega0.clone());
    let mut forcing_integral = 0.0;
    let mut g_prev = forcing.sup_norm(0.0);

    for step in 0..steps {
        let t = step as f64 * dt;
        let speed = if_rk4_step(&mut w, &e, t, dt, |state, s| {
            let mut tend = vorticity_advection(&o, state, config.dealias);
            forcing.add_to(&mut tend.coeffs, s);
            tend
        });
        courant_check(speed, dt, dx, step)?;
        if config.forcing.is_some() {
            let g_next = forcing.sup_norm(t + dt);
            forcing_integral += 0.5 * dt * (g_prev + g_next);
            g_prev = g_next;
        }
        let done = step + 1;
        if done % config.snapshot_stride == 0 || done == steps {
            let field = o.inverse(&Spectrum::from_raw(grid, w.clone()));
            if field.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NotFinite { step: done });
            }
            traj.push(done, done as f64 * dt, field);
        }
    }
    traj.set_forcing_integral(forcing_integral);
    Ok(traj)
}

/// Advects and diffuses a passive scalar by an archived velocity.
///
/// `config.nu` is the scalar diffusivity and `config.forcing` its source.
pub fn transport_linear(
    theta0: &ScalarField,
    archive: &VelocityArchive,
    config: &SimulationConfig,
) -> Result<Trajectory> {
    let steps = config.steps()?;
    if theta0.grid() != archive.grid() {
        return Err(Error::GridMismatch {
            expected: archive.grid().n(),
            found: theta0.grid().n(),
        });
    }
    archive.check_coverage(0.0, config.t_end)?;
    let stride_span = config.dt * config.snapshot_stride as f64;
    if archive.max_spacing() > stride_span * (1.0 + 1e-9) {
        return Err(Error::ArchiveGap {
            gap: archive.max_spacing(),
            max: stride_span,
        });
    }
    let grid = theta0.grid();
    let o = ops(grid);
    let forcing = ForcingSpectrum::new(&o, config.forcing.as_ref())?;
    let e = half_step_factors(&o, config.nu, config.dt);
    let dt = config.dt;
    let dx = grid.dx();

    let mut w = o.forward(theta0).into_coeffs();
    let mean = w[0];
    let mut traj = Trajectory::start(config.clone(), theta0.clone());
    let mut failure = None;

    for step in 0..steps {
        let t = step as f64 * dt;
        let speed = if_rk4_step(&mut w, &e, t, dt, |state, s| {
            let u = match archive.field_at(s) {
                Ok(u) => u,
                Err(err) => {
                    failure.get_or_insert(err);
                    VectorField::zeros(grid)
                }
            };
            let mut tend = advection(&o, &u, state, config.dealias);
            forcing.add_to(&mut tend.coeffs, s);
            tend
        });
        if let Some(err) = failure.take() {
            return Err(err);
        }
        courant_check(speed, dt, dx, step)?;
        // the mean is carried unchanged by advection and diffusion
        w[0] = mean;
        let done = step + 1;
        if done % config.snapshot_stride == 0 || done == steps {
            let field = o.inverse(&Spectrum::from_raw(grid, w.clone()));
            if field.values().iter().any(|v| !v.is_finite()) {
                return Err(Error::NotFinite { step: done });
            }
            traj.push(done, done as f64 * dt, field);
        }
    }
    Ok(traj)
}
