//! Continuity of the inviscid solution map: a Hölder exponent
//! `sup_{t≤T}‖S_t(ω₀ + δπ) − S_t(ω₀)‖₂ ∼ δ^{α̂(T)}` per horizon, and the
//! viscous counterpart `sup_t‖u^ν − u‖₂² ∼ ν^{α̂}`.

use rayon::prelude::*;
use yudovich::diagnostics::lp_norm;
use yudovich::dynamics::{evolve, Trajectory};
use yudovich::spectral::biot_savart;
use yudovich::ScalarField;

use crate::error::{HarnessError, Result};
use crate::rate::log_log_fit;
use crate::report::{fmt_list, ExperimentReport};
use crate::seed::derive_seed;
use crate::spec::{ExperimentSpec, InitialData};
use crate::svg::{Plot, Series};
use crate::sweep::{resolution_guard, run_ladder, sup_distance_until, Stepping};

/// Lower bound on the fitted exponent at the longest horizon.
pub const ALPHA_FLOOR: f64 = 0.2;

/// Perturbation direction, scaled to the L² norm of the datum: the next
/// eigenmode for an eigenmode, an independent draw for random data and an
/// `s = 1/2` random field otherwise.
pub fn perturbation(spec: &ExperimentSpec, omega0: &ScalarField) -> Result<ScalarField> {
    let direction = match spec.data {
        InitialData::Eigenmode { mode } => InitialData::Eigenmode { mode: mode + 1 },
        InitialData::RandomBesov { .. } | InitialData::RandomBand { .. } => spec.data.clone(),
        _ => InitialData::RandomBesov { s: 0.5 },
    };
    let raw = direction.build(spec.grid()?, derive_seed(spec.seed, "perturbation"))?;
    let scale = lp_norm(omega0, 2.0)? / lp_norm(&raw, 2.0)?;
    Ok(raw.scaled(if scale.is_finite() { scale } else { 0.0 }))
}

/// `sup_t ‖u^a(t) − u^b(t)‖₂²` over the shared snapshots.
pub fn sup_velocity_gap(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in a.snapshots().iter().zip(b.snapshots()) {
        let d = biot_savart(&x.sub(y))?;
        worst = worst.max(d.l2_norm().powi(2));
    }
    Ok(worst)
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.id);
    if let Some(&h) = spec.horizons.iter().find(|&&h| h > spec.t_end * (1.0 + 1e-12) || h <= 0.0) {
        return Err(HarnessError::Spec(format!("horizon {h} outside (0, {}]", spec.t_end)));
    }
    let omega0 = spec.initial_data()?;
    let pert = perturbation(spec, &omega0)?;
    let stepping = Stepping::of(spec);
    let inviscid = stepping.config(0.0);

    // base, identical-data rerun, then one run per δ
    let mut data = vec![omega0.clone(), omega0.clone()];
    data.extend(spec.deltas.iter().map(|&d| omega0.add(&pert.scaled(d))));
    let mut runs = data
        .par_iter()
        .map(|w| evolve(w, &inviscid).map_err(HarnessError::from))
        .collect::<Result<Vec<_>>>()?;
    let perturbed = runs.split_off(2);
    let (base, rerun) = (&runs[0], &runs[1]);

    report.check(
        "identical_data",
        base.snapshots() == rerun.snapshots() && base.times() == rerun.times(),
        "a second run from the same datum reproduces every snapshot bit for bit",
    );

    let mut alphas = Vec::with_capacity(spec.horizons.len());
    let mut plot = Plot::new("solution-map distance vs perturbation size", "delta", "sup_t |S(w0 + d p) - S(w0)|_2")
        .log_log();
    for &h in &spec.horizons {
        let gaps = perturbed
            .iter()
            .map(|r| sup_distance_until(r, base, 2.0, h))
            .collect::<Result<Vec<f64>>>()?;
        for (&d, &g) in spec.deltas.iter().zip(&gaps) {
            report.row(h, 0.0, format!("map_distance_delta_{d:e}"), g);
        }
        let fit = log_log_fit(&spec.deltas, &gaps)?;
        report.row(h, 0.0, "alpha_hat", fit.slope);
        alphas.push(fit.slope);
        plot = plot.with_series(Series::new(
            format!("T = {h}"),
            spec.deltas.iter().copied().zip(gaps.iter().copied()).collect(),
        ));
        report.fits.push((format!("alpha_T{h}"), fit));
    }
    report.plots.push(("map_distance_vs_delta".into(), plot));
    let last = *alphas.last().unwrap_or(&f64::NAN);
    report.check(
        "alpha_floor",
        last > ALPHA_FLOOR,
        format!("alpha at T = {} is {last:.4} (floor {ALPHA_FLOOR})", spec.horizons.last().unwrap_or(&f64::NAN)),
    );
    report.check(
        "alpha_nonincreasing",
        alphas.windows(2).all(|w| w[1] <= w[0]),
        format!("alpha over horizons {:?}: {}", spec.horizons, fmt_list(&alphas)),
    );

    let nus = spec.ladder.values();
    let viscous = run_ladder(&omega0, nus, stepping)?;
    let velocity_gaps = viscous.iter().map(|r| sup_velocity_gap(r, base)).collect::<Result<Vec<f64>>>()?;
    for (&nu, &g) in nus.iter().zip(&velocity_gaps) {
        report.row(stepping.t_end, nu, "velocity_gap_sq", g);
    }
    let fit = log_log_fit(nus, &velocity_gaps)?;
    report.check(
        "viscous_exponent",
        fit.slope > 0.0,
        format!("sup_t |u_nu - u|_2^2 ~ nu^{:.4} (R² {:.4})", fit.slope, fit.r_squared),
    );
    report.fits.push(("velocity_gap".into(), fit));
    report.plots.push((
        "velocity_gap_vs_nu".into(),
        Plot::new("viscous velocity gap", "nu", "sup_t |u_nu - u|_2^2")
            .log_log()
            .with_series(Series::new("gap", nus.iter().copied().zip(velocity_gaps.iter().copied()).collect())),
    ));

    if spec.guard {
        let nu_min = spec.ladder.smallest();
        report.guard = Some(resolution_guard(
            spec,
            &omega0,
            &format!("sup_t |u_nu - u|_2^2 at nu = {nu_min:e}"),
            *velocity_gaps.last().expect("nonempty ladder"),
            |w, st| {
                let r = run_ladder(w, &[0.0, nu_min], st)?;
                sup_velocity_gap(&r[1], &r[0])
            },
        )?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{ExperimentId, ViscosityLadder};

    #[test]
    fn eigenmode_perturbation_responds_linearly() {
        let mut spec = ExperimentSpec::default_for(ExperimentId::E5, 1);
        spec.data = InitialData::Eigenmode { mode: 1 };
        spec.n = 32;
        spec.dt = 0.05;
        spec.t_end = 1.0;
        spec.stride = 2;
        spec.horizons = vec![0.5, 1.0];
        spec.guard = false;
        spec.ladder = ViscosityLadder::new(vec![1e-1, 5e-2, 2e-2, 1e-2]).unwrap();
        let report = run(&spec).unwrap();
        // sin x₁ + δ sin 2x₁ is a steady shear, so the distance is exactly δ‖sin 2x₁‖₂
        for fit in report.fits.iter().filter(|(n, _)| n.starts_with("alpha")) {
            assert!((fit.1.slope - 1.0).abs() < 1e-6, "{fit:?}");
        }
        let norm = std::f64::consts::PI * 2f64.sqrt();
        for row in report.rows.iter().filter(|r| r.quantity.starts_with("map_distance")) {
            let delta: f64 = row.quantity.trim_start_matches("map_distance_delta_").parse().unwrap();
            assert!((row.value - delta * norm).abs() < 1e-9 * delta * norm, "{row:?}");
        }
        assert!(report.check_named("identical_data").unwrap().passed);
        assert!(report.check_named("viscous_exponent").unwrap().passed);
    }

    #[test]
    fn horizons_must_lie_inside_the_run() {
        let mut spec = ExperimentSpec::default_for(ExperimentId::E5, 1);
        spec.horizons = vec![5.0];
        assert!(matches!(run(&spec), Err(HarnessError::Spec(_))));
    }
}
