use std::io::Write;

use rayon::prelude::*;

use super::flow::{integrate_realization, Direction, FlowParams, Scheme};
use super::stats::{PointEstimate, RunningStats};
use crate::archive::VelocityArchive;
use crate::diagnostics::dissipation_integral;
use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::field::ScalarField;
use crate::interp::Stencil;

/// Realizations per reduction chunk; fixed so results do not depend on the
/// thread count.
const CHUNK: usize = 64;

fn check_archive(archive: &VelocityArchive, nu: f64) -> Result<()> {
    if archive.forced() {
        return Err(Error::ForcedArchive);
    }
    if let Some(a) = archive.nu() {
        if (a - nu).abs() > 1e-12 * a.abs().max(nu.abs()) {
            return Err(Error::ViscosityMismatch {
                archive: a,
                requested: nu,
            });
        }
    }
    Ok(())
}

/// Streams `ω₀(A_t(x))` for realizations `range` into one accumulator per point.
fn accumulate(
    omega0: &ScalarField,
    archive: &VelocityArchive,
    params: &FlowParams,
    steps: usize,
    points: &[[f64; 2]],
    range: std::ops::Range<usize>,
) -> Vec<RunningStats> {
    let g = omega0.grid();
    let mut acc = vec![RunningStats::default(); points.len()];
    let mut pts = points.to_vec();
    for r in range {
        pts.copy_from_slice(points);
        integrate_realization(archive, &mut pts, params, steps, Direction::Backward, r, |_, _| {});
        for (a, p) in acc.iter_mut().zip(&pts) {
            a.push(Stencil::new(g, *p).apply(omega0.values(), g.n()));
        }
    }
    acc
}

fn merge_in_order(parts: Vec<Vec<RunningStats>>, len: usize) -> Vec<RunningStats> {
    let mut total = vec![RunningStats::default(); len];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

/// Monte-Carlo estimate of `E[ω₀(A_t(x))]` at each evaluation point.
pub fn mc_vorticity(
    omega0: &ScalarField,
    archive: &VelocityArchive,
    params: &FlowParams,
    eval_points: &[[f64; 2]],
) -> Result<Vec<PointEstimate>> {
    check_archive(archive, params.nu)?;
    let steps = params.steps()?;
    archive.check_coverage(0.0, params.t)?;
    if omega0.grid() != archive.grid() {
        return Err(Error::GridMismatch {
            expected: archive.grid().n(),
            found: omega0.grid().n(),
        });
    }
    let m = params.realizations;
    let chunks = m.div_ceil(CHUNK);
    let parts: Vec<Vec<RunningStats>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(m);
            accumulate(omega0, archive, params, steps, eval_points, range)
        })
        .collect();
    Ok(merge_in_order(parts, eval_points.len()).iter().map(PointEstimate::from).collect())
}

/// Options of [`fdr_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrOptions {
    pub realizations: usize,
    pub dt: f64,
    pub seed: u64,
    /// Points per axis of the quadrature grid for `∫Var dx`.
    pub subgrid: usize,
    /// Batches for the batch-means standard error.
    pub batches: usize,
    pub scheme: Scheme,
}

impl FdrOptions {
    pub fn new(realizations: usize, dt: f64, seed: u64) -> Self {
        Self {
            realizations,
            dt,
            seed,
            subgrid: 32,
            batches: 20,
            scheme: Scheme::default(),
        }
    }
}

/// Both sides of the fluctuation–dissipation identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdrReport {
    pub t: f64,
    /// `ν ∫₀ᵗ ‖∇ω‖₂² ds` from the stored snapshots.
    pub lhs: f64,
    /// `½ ∫ Var[ω₀(A_t(x))] dx` on the quadrature subgrid.
    pub rhs: f64,
    /// Batch-means standard error of `rhs`.
    pub std_error: f64,
}

impl FdrReport {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// Compares viscous enstrophy dissipation with the variance of the initial
/// vorticity sampled along backward stochastic characteristics.
pub fn fdr_check(traj: &Trajectory, opts: &FdrOptions) -> Result<FdrReport> {
    if traj.nu() == 0.0 {
        return Err(Error::Inviscid);
    }
    if traj.forced() {
        return Err(Error::ForcedArchive);
    }
    if opts.batches < 2 || opts.realizations < 2 * opts.batches || opts.subgrid == 0 {
        return Err(invalid(
            "realizations",
            "need at least two realizations per batch, two batches and a nonempty subgrid",
        ));
    }
    let t = traj.end_time();
    let lhs = dissipation_integral(traj, |_| 1.0)?;
    let archive = traj.to_archive()?;
    let params = FlowParams::new(traj.nu(), opts.realizations, opts.dt, t, opts.seed).with_scheme(opts.scheme);
    let steps = params.steps()?;
    let m = opts.subgrid;
    let h = crate::grid::TWO_PI / m as f64;
    let points: Vec<[f64; 2]> = (0..m * m).map(|i| [(i / m) as f64 * h, (i % m) as f64 * h]).collect();
    let cell = h * h;

    let per_batch = opts.realizations / opts.batches;
    let batches: Vec<Vec<RunningStats>> = (0..opts.batches)
        .into_par_iter()
        .map(|b| {
            let end = if b + 1 == opts.batches {
                opts.realizations
            } else {
                (b + 1) * per_batch
            };
            accumulate(traj.initial(), &archive, &params, steps, &points, b * per_batch..end)
        })
        .collect();
    let half_integral = |stats: &[RunningStats]| 0.5 * cell * stats.iter().map(|s| s.variance()).sum::<f64>();
    let mut spread = RunningStats::default();
    for b in &batches {
        spread.push(half_integral(b));
    }
    let total = merge_in_order(batches, points.len());
    Ok(FdrReport {
        t,
        lhs,
        rhs: half_integral(&total),
        std_error: spread.std_error(),
    })
}

/// Writes `point,mean,variance,se` rows.
pub fn write_point_estimates<W: Write>(w: W, estimates: &[PointEstimate]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["point", "mean", "variance", "se"])?;
    for (i, e) in estimates.iter().enumerate() {
        out.write_record(&[
            i.to_string(),
            format!("{:e}", e.mean),
            format!("{:e}", e.variance),
            format!("{:e}", e.std_error),
        ])?;
    }
    out.flush()?;
    Ok(())
}
