use rand::Rng;
use rayon::prelude::*;

use super::flow::{integrate_realization, realization_rng, Direction, FlowParams, VelocitySource};
use crate::error::{invalid, Result};
use crate::grid::{torus_distance, TWO_PI};

/// Fitted exponent of `E[d(X_t(x), X_t(y))] ∼ δ₀^α` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    pub t: f64,
    pub alpha: f64,
    pub r_squared: f64,
    /// Mean final separation per initial separation.
    pub mean_separation: Vec<f64>,
}

/// Options of [`pair_separation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationOptions {
    pub delta0: Vec<f64>,
    /// Observation times, multiples of `dt` in `(0, t]`.
    pub times: Vec<f64>,
    /// Number of base points `x`; each is paired with one `y` per `δ₀`.
    pub base_points: usize,
}

/// Advects pairs at initial separations `δ₀` under shared noise and fits the
/// log–log slope of the mean separation against `δ₀` at each observation time.
pub fn pair_separation<S: VelocitySource + ?Sized>(
    source: &S,
    params: &FlowParams,
    opts: &SeparationOptions,
) -> Result<Vec<HolderFit>> {
    let steps = params.steps()?;
    source.check_coverage(0.0, params.t)?;
    let (dmin, dmax) = opts
        .delta0
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if opts.delta0.len() < 2 || !(dmin > 0.0) || dmax / dmin < 100.0 * (1.0 - 1e-12) {
        return Err(invalid("delta0", "initial separations must be positive and span two decades"));
    }
    if opts.base_points == 0 {
        return Err(invalid("base_points", "need at least one base point"));
    }
    let obs: Vec<usize> = opts
        .times
        .iter()
        .map(|&t| {
            let s = t / params.dt;
            if t <= 0.0 || t > params.t * (1.0 + 1e-12) || (s - s.round()).abs() > 1e-6 * s {
                Err(invalid("times", format!("observation time {t} is not a step of (0, {}]", params.t)))
            } else {
                Ok(s.round() as usize)
            }
        })
        .collect::<Result<_>>()?;
    if obs.iter().any(|&s| s > steps) {
        return Err(invalid("times", "observation beyond the horizon"));
    }

    // base points and directions come from a stream no realization uses
    let mut rng = realization_rng(params.seed, usize::MAX);
    let nd = opts.delta0.len();
    let mut starts = Vec::with_capacity(opts.base_points * (nd + 1));
    for _ in 0..opts.base_points {
        let x = [rng.random::<f64>() * TWO_PI, rng.random::<f64>() * TWO_PI];
        let th = rng.random::<f64>() * TWO_PI;
        starts.push(x);
        for &d in &opts.delta0 {
            starts.push([x[0] + d * th.cos(), x[1] + d * th.sin()]);
        }
    }

    let per_realization: Vec<Vec<f64>> = (0..params.realizations)
        .into_par_iter()
        .map(|r| {
            let mut pts = starts.clone();
            let mut sums = vec![0.0; obs.len() * nd];
            integrate_realization(source, &mut pts, params, steps, Direction::Forward, r, |step, p| {
                for (oi, _) in obs.iter().enumerate().filter(|(_, &s)| s == step) {
                    for b in 0..opts.base_points {
                        let base = b * (nd + 1);
                        for k in 0..nd {
                            sums[oi * nd + k] += torus_distance(p[base], p[base + 1 + k]);
                        }
                    }
                }
            });
            sums
        })
        .collect();

    let count = (params.realizations * opts.base_points) as f64;
    let mut totals = vec![0.0; obs.len() * nd];
    for s in &per_realization {
        for (t, v) in totals.iter_mut().zip(s) {
            *t += v;
        }
    }
    Ok(opts
        .times
        .iter()
        .enumerate()
        .map(|(oi, &t)| {
            let mean: Vec<f64> = (0..nd).map(|k| totals[oi * nd + k] / count).collect();
            let pts: Vec<(f64, f64)> = opts.delta0.iter().zip(&mean).map(|(d, m)| (d.ln(), m.ln())).collect();
            let (alpha, r2) = fit_line(&pts);
            HolderFit {
                t,
                alpha,
                r_squared: r2,
                mean_separation: mean,
            }
        })
        .collect())
}

fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (sxy / sxx, r2)
}
