//! Propagation of Besov regularity: the seminorm at the decaying index
//! `s(t) = s·exp(−Ĉ t ‖ω₀‖_∞)` stays uniformly bounded across the ladder.

use yudovich::diagnostics::besov_seminorm;
use yudovich::dynamics::{evolve, Trajectory};

use super::LadderRuns;
use crate::error::Result;
use crate::report::{nu_label, ExperimentReport};
use crate::seed::derive_seed;
use crate::spec::ExperimentSpec;
use crate::svg::{Plot, Series};
use crate::sweep::{fit_regularity_decay, resolution_guard, RegularityDecay, Stepping};

/// Largest allowed ratio of a viscous seminorm to the inviscid one.
pub const UNIFORMITY_FACTOR: f64 = 2.0;
/// Horizon of the uniformity assertion.
pub const HORIZON: f64 = 2.0;

fn seminorms(traj: &Trajectory, decay: &RegularityDecay, s: f64) -> Result<Vec<(f64, f64)>> {
    traj.iter()
        .map(|(t, w)| Ok((t, besov_seminorm(w, decay.target(s, t), 2.0)?.seminorm)))
        .collect()
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.id);
    let grid = spec.grid()?;
    let stepping = Stepping::of(spec);
    let mut guard_ratio = None;
    for &s in &spec.s_list {
        let data = spec.data.with_s(s);
        let omega0 = data.build(grid, derive_seed(spec.seed, "data"))?;
        let runs = LadderRuns::run(&omega0, spec.ladder.values(), stepping)?;
        let decay = fit_regularity_decay(&runs.reference)?;
        report.row(0.0, 0.0, format!("c_hat_s{s}"), decay.c_hat);
        report.row(0.0, 0.0, format!("measured_index_s{s}"), decay.s0);

        let quantity = format!("besov_seminorm_s{s}");
        let inviscid = seminorms(&runs.reference, &decay, s)?;
        for &(t, v) in &inviscid {
            report.row(t, 0.0, &quantity, v);
        }
        let mut plot = Plot::new(format!("Besov seminorm at s(t), s = {s}"), "t", "seminorm")
            .log_y()
            .with_series(Series::new(nu_label(0.0), inviscid.clone()));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        let mut last_ratio = 1.0;
        for (&nu, traj) in runs.nus.iter().zip(&runs.viscous) {
            let series = seminorms(traj, &decay, s)?;
            for (&(t, v), &(_, v0)) in series.iter().zip(&inviscid) {
                report.row(t, nu, &quantity, v);
                if t <= HORIZON * (1.0 + 1e-12) && v0 > 0.0 {
                    lo = lo.min(v / v0);
                    hi = hi.max(v / v0);
                }
            }
            last_ratio = series.last().map_or(1.0, |x| x.1) / inviscid.last().map_or(1.0, |x| x.1);
            plot = plot.with_series(Series::new(nu_label(nu), series));
        }
        report.check(
            format!("uniform_s{s}"),
            hi <= UNIFORMITY_FACTOR,
            format!(
                "viscous/inviscid seminorm ratios for t <= {HORIZON} lie in [{lo:.4}, {hi:.4}] (C = {:.4})",
                decay.c_hat
            ),
        );
        report.plots.push((format!("besov_vs_t_s{s}"), plot));
        if guard_ratio.is_none() {
            guard_ratio = Some((s, omega0, decay, last_ratio));
        }
        report.runs.extend(runs.summaries().into_iter().map(|mut r| {
            r.label = format!("s{s}_{}", r.label);
            r
        }));
    }

    if let (true, Some((s, omega0, decay, coarse))) = (spec.guard, guard_ratio) {
        let nu_min = spec.ladder.smallest();
        report.guard = Some(resolution_guard(
            spec,
            &omega0,
            &format!("seminorm ratio at t = {} for s = {s}, nu = {nu_min:e}", stepping.t_end),
            coarse,
            |w, st| {
                let viscous = evolve(w, &st.config(nu_min))?;
                let inviscid = evolve(w, &st.config(0.0))?;
                let s_t = decay.target(s, st.t_end);
                Ok(besov_seminorm(viscous.last(), s_t, 2.0)?.seminorm / besov_seminorm(inviscid.last(), s_t, 2.0)?.seminorm)
            },
        )?);
    }
    Ok(report)
}
