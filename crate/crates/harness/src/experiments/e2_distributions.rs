//! Convergence of the vorticity distribution function: `W₁(π_{ω^ν(t)}, π_{ω₀})`
//! along the ladder, with the inviscid run pinned at the discretization floor.

use yudovich::diagnostics::{distribution, wasserstein1};
use yudovich::dynamics::{evolve, Trajectory};
use yudovich::diagnostics::EmpiricalDistribution;

use super::LadderRuns;
use crate::error::Result;
use crate::report::{fmt_list, nu_label, strictly_decreasing, ExperimentReport};
use crate::spec::ExperimentSpec;
use crate::svg::{Plot, Series};
use crate::sweep::{resolution_guard, Stepping};

/// Inviscid floor as a fraction of `‖ω₀‖_∞`.
pub const FLOOR_FRACTION: f64 = 5e-3;
/// The floor is asserted up to this time.
pub const FLOOR_HORIZON: f64 = 3.0;

fn w1_series(traj: &Trajectory, pi0: &EmpiricalDistribution) -> Result<Vec<(f64, f64)>> {
    traj.iter()
        .map(|(t, w)| Ok((t, wasserstein1(&distribution(w), pi0)?)))
        .collect()
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.id);
    let omega0 = spec.initial_data()?;
    let pi0 = distribution(&omega0);
    let runs = LadderRuns::run(&omega0, spec.ladder.values(), Stepping::of(spec))?;
    let t_end = runs.reference.end_time();

    let mut by_time = Plot::new("W1 distance to the initial distribution", "t", "W1").log_y();
    let inviscid = w1_series(&runs.reference, &pi0)?;
    for &(t, w) in &inviscid {
        report.row(t, 0.0, "w1", w);
    }
    by_time = by_time.with_series(Series::new(nu_label(0.0), inviscid.clone()));

    let mut final_w1 = Vec::with_capacity(runs.nus.len());
    for (&nu, traj) in runs.nus.iter().zip(&runs.viscous) {
        let series = w1_series(traj, &pi0)?;
        for &(t, w) in &series {
            report.row(t, nu, "w1", w);
        }
        final_w1.push(series.last().map_or(0.0, |s| s.1));
        by_time = by_time.with_series(Series::new(nu_label(nu), series));
    }
    report.check(
        "decreasing_at_T",
        strictly_decreasing(&final_w1),
        format!("W1 at t = {t_end} along the ladder {}", fmt_list(&final_w1)),
    );

    let horizon = FLOOR_HORIZON.min(t_end);
    let floor = FLOOR_FRACTION * omega0.max_abs();
    let worst = inviscid
        .iter()
        .filter(|(t, _)| *t <= horizon * (1.0 + 1e-12))
        .map(|s| s.1)
        .fold(0.0, f64::max);
    report.check(
        "inviscid_floor",
        worst <= floor,
        format!("max W1 of the inviscid run for t <= {horizon}: {worst:.3e} vs {floor:.3e}"),
    );

    let vs_nu = Plot::new("W1 at the horizon vs viscosity", "nu", "W1").log_log().with_series(Series::new(
        format!("t = {t_end}"),
        runs.nus.iter().copied().zip(final_w1.iter().copied()).collect(),
    ));
    report.plots.push(("w1_vs_nu".into(), vs_nu));
    report.plots.push(("w1_vs_t".into(), by_time));

    if spec.guard {
        let nu_min = spec.ladder.smallest();
        report.guard = Some(resolution_guard(
            spec,
            &omega0,
            &format!("W1 at t = {t_end} for nu = {nu_min:e}"),
            *final_w1.last().expect("nonempty ladder"),
            |w, st| {
                let traj = evolve(w, &st.config(nu_min))?;
                Ok(wasserstein1(&distribution(traj.last()), &distribution(w))?)
            },
        )?);
    }
    report.runs = runs.summaries();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{ExperimentId, InitialData, ViscosityLadder};
    use yudovich::grid::TWO_PI;

    /// `W₁` between the sampled laws of `a·sin x₁` and `b·sin x₁`: the sorted
    /// samples pair up node by node, so it is `|a − b|` times the grid mean of `|sin|`.
    fn arcsine_w1(a: f64, b: f64, n: usize) -> f64 {
        let mean_abs = (0..n).map(|j| (TWO_PI * j as f64 / n as f64).sin().abs()).sum::<f64>() / n as f64;
        (a - b).abs() * mean_abs
    }

    #[test]
    fn stationary_mode_matches_the_quantile_oracle() {
        let mut spec = ExperimentSpec::default_for(ExperimentId::E2, 1);
        spec.data = InitialData::Eigenmode { mode: 1 };
        spec.n = 32;
        spec.dt = 0.05;
        spec.t_end = 1.0;
        spec.stride = 5;
        spec.ladder = ViscosityLadder::new(vec![1e-1, 5e-2, 2e-2, 1e-2]).unwrap();
        let report = run(&spec).unwrap();
        assert!(report.passed(), "{}", report.summary());
        for row in report.rows.iter().filter(|r| r.quantity == "w1") {
            let exact = arcsine_w1(1.0, (-row.nu * row.time).exp(), 32);
            assert!((row.value - exact).abs() < 1e-10, "{row:?} vs {exact}");
        }
    }
}
