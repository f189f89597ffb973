//! Vanishing of the dissipation integrals `ν∫₀ᵀ∫f″(ω^ν)|∇ω^ν|²` along the
//! ladder for `f(y) = y²/2` and `f(y) = y⁴/12`.

use yudovich::diagnostics::{dissipation_integral, enstrophy};
use yudovich::dynamics::{evolve, SimulationConfig};
use yudovich::fields::eigenmode;
use yudovich::grid::GridSpec;

use crate::error::Result;
use crate::rate::log_log_fit;
use crate::report::{fmt_list, nu_label, strictly_decreasing, ExperimentReport, RunSummary};
use crate::spec::ExperimentSpec;
use crate::svg::{Plot, Series};
use crate::sweep::{resolution_guard, run_ladder, Stepping};

/// Relative tolerance of the stationary-mode oracle.
pub const MODE_TOLERANCE: f64 = 1e-3;
/// Relative tolerance of the enstrophy balance. The trapezoid rule over the
/// snapshots carries an O(Δt²) error that rough data make visible, about
/// 1e-3 at one snapshot per step of 5e-3.
pub const BALANCE_TOLERANCE: f64 = 5e-3;

/// The two test functions, by name and second derivative.
const WEIGHTS: [(&str, fn(f64) -> f64); 2] = [("quadratic", |_| 1.0), ("quartic", |y| y * y)];

/// `ν∫₀ᵀ‖∇ω‖₂²` for `ω₀ = sin x₁`, which decays as `e^{−νt}sin x₁`.
pub fn stationary_dissipation(nu: f64, t: f64) -> f64 {
    std::f64::consts::PI.powi(2) * (1.0 - (-2.0 * nu * t).exp())
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.id);
    let omega0 = spec.initial_data()?;
    let stepping = Stepping::of(spec);
    let nus = spec.ladder.values();
    let runs = run_ladder(&omega0, nus, stepping)?;
    let t_end = stepping.t_end;

    let mut plot = Plot::new("dissipation integral vs viscosity", "nu", "dissipation").log_log();
    let mut quadratic = Vec::new();
    for (name, f2) in WEIGHTS {
        let values = runs
            .iter()
            .map(|r| dissipation_integral(r, f2))
            .collect::<yudovich::Result<Vec<f64>>>()?;
        for (&nu, &v) in nus.iter().zip(&values) {
            report.row(t_end, nu, format!("dissipation_{name}"), v);
        }
        report.check(
            format!("decreasing_{name}"),
            strictly_decreasing(&values),
            format!("{name} dissipation along the ladder {}", fmt_list(&values)),
        );
        let fit = log_log_fit(nus, &values)?;
        report.check(
            format!("slope_{name}"),
            fit.slope > 0.0,
            format!("log-log slope {:.4} (R² {:.4})", fit.slope, fit.r_squared),
        );
        report.fits.push((name.to_string(), fit));
        plot = plot.with_series(Series::new(name, nus.iter().copied().zip(values.iter().copied()).collect()));
        if name == "quadratic" {
            quadratic = values;
        }
    }
    report.plots.push(("dissipation_vs_nu".into(), plot));

    // the quadratic integral is exactly the enstrophy lost by the run
    let worst_balance = runs
        .iter()
        .zip(&quadratic)
        .map(|(r, &d)| ((enstrophy(r.initial()) - enstrophy(r.last())) - d).abs() / d)
        .fold(0.0, f64::max);
    report.check(
        "enstrophy_balance",
        worst_balance <= BALANCE_TOLERANCE,
        format!("largest relative gap to the enstrophy drop {worst_balance:.3e}"),
    );

    let worst_mode = stationary_mode_gap(nus, t_end)?;
    report.check(
        "stationary_mode",
        worst_mode <= MODE_TOLERANCE,
        format!("largest relative gap to pi^2(1 - exp(-2 nu T)) {worst_mode:.3e}"),
    );

    if spec.guard {
        let nu_min = spec.ladder.smallest();
        report.guard = Some(resolution_guard(
            spec,
            &omega0,
            &format!("quadratic dissipation at nu = {nu_min:e}"),
            *quadratic.last().expect("nonempty ladder"),
            |w, st| Ok(dissipation_integral(&evolve(w, &st.config(nu_min))?, |_| 1.0)?),
        )?);
    }
    report.runs = nus.iter().zip(&runs).map(|(&nu, r)| RunSummary::of(nu_label(nu), r)).collect();
    Ok(report)
}

/// Largest relative deviation of the stationary-mode ladder from its closed form.
fn stationary_mode_gap(nus: &[f64], t_end: f64) -> Result<f64> {
    let g = GridSpec::new(32)?;
    let w0 = eigenmode(1, g)?;
    let mut worst: f64 = 0.0;
    for &nu in nus {
        let steps = (t_end / 0.05).round().max(1.0);
        let traj = evolve(&w0, &SimulationConfig::new(nu, t_end / steps, t_end))?;
        let exact = stationary_dissipation(nu, t_end);
        worst = worst.max((dissipation_integral(&traj, |_| 1.0)? - exact).abs() / exact);
    }
    Ok(worst)
}
