//! Exponential integrability of the velocity gradient, Calderon-Zygmund
//! ratios and the log-Lipschitz modulus, over a fixed corpus and along the
//! ladder. Calibration of the frozen constants lives here too.

use rayon::prelude::*;
use yudovich::diagnostics::{cz_ratio, exp_integral, log_lipschitz_modulus, LogLipschitzBound};
use yudovich::spectral::biot_savart;
use yudovich::ScalarField;

use super::LadderRuns;
use crate::constants::{round_up, Constants, CZ_EXPONENTS};
use crate::error::Result;
use crate::report::{nu_label, ExperimentReport};
use crate::seed::derive_seed;
use crate::spec::{ExperimentSpec, InitialData};
use crate::svg::{Plot, Series};
use crate::sweep::{resolution_guard, Stepping};

/// Allowed relative change of the log-Lipschitz constant when the pair count doubles.
pub const LOGLIP_STABILITY: f64 = 0.1;

/// Named members of the functional corpus.
pub fn corpus_members(size: usize) -> Vec<InitialData> {
    let mut members = vec![
        InitialData::TaylorGreen,
        InitialData::Eigenmode { mode: 1 },
        InitialData::Eigenmode { mode: 4 },
        InitialData::Disk {
            radius: 1.0,
            mollify: Some(0.1),
        },
        InitialData::Disk {
            radius: 1.5,
            mollify: Some(0.2),
        },
        InitialData::Koch {
            iterations: 3,
            mollify: Some(0.1),
        },
        InitialData::RandomBand { s: 1.0, kmax: 8 },
        InitialData::RandomBand { s: 2.0, kmax: 16 },
    ];
    let mut s = [0.3, 0.5, 0.75, 1.0, 1.5].into_iter().cycle();
    while members.len() < size {
        members.push(InitialData::RandomBesov { s: s.next().expect("cycle") });
    }
    members.truncate(size);
    members
}

/// The corpus on the experiment grid; each random member gets its own seed.
pub fn corpus(spec: &ExperimentSpec) -> Result<Vec<(String, ScalarField)>> {
    let grid = spec.grid()?;
    corpus_members(spec.corpus_size)
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let w = d.build(grid, derive_seed(spec.seed, &format!("corpus_{i}")))?;
            Ok((format!("{i}:{}", d.describe()), w))
        })
        .collect()
}

/// Functionals of one field with `β = γ̂/Ω_∞` for the supplied `Ω_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldFunctionals {
    pub exp_integral: f64,
    pub saturated: bool,
    pub cz: [f64; 4],
}

pub fn functionals(omega: &ScalarField, gamma_hat: f64, omega_inf: f64) -> Result<FieldFunctionals> {
    let u = biot_savart(omega)?;
    let e = exp_integral(&u, gamma_hat / omega_inf);
    let mut cz = [0.0; 4];
    for (slot, p) in cz.iter_mut().zip(CZ_EXPONENTS) {
        *slot = cz_ratio(omega, p)?;
    }
    Ok(FieldFunctionals {
        exp_integral: e.value,
        saturated: e.is_saturated(),
        cz,
    })
}

fn ladder_functionals(runs: &LadderRuns, gamma_hat: f64, omega_inf: f64) -> Result<Vec<(f64, f64, FieldFunctionals)>> {
    let jobs: Vec<(f64, f64, &ScalarField)> = std::iter::once((0.0, &runs.reference))
        .chain(runs.nus.iter().copied().zip(&runs.viscous))
        .flat_map(|(nu, traj)| traj.iter().map(move |(t, w)| (nu, t, w)))
        .collect();
    jobs.par_iter()
        .map(|&(nu, t, w)| Ok((nu, t, functionals(w, gamma_hat, omega_inf)?)))
        .collect()
}

fn loglip(omega: &ScalarField, constants: &Constants, pairs: usize, seed: u64) -> Result<f64> {
    let bound = LogLipschitzBound {
        beta: constants.gamma_hat / omega.max_abs(),
        c_k: constants.c_k,
    };
    Ok(log_lipschitz_modulus(&biot_savart(omega)?, bound, pairs, seed)?)
}

/// Fits `γ̂`, `Ĉ_CZ`, `Ĉ_K` on the corpus and freezes regression maxima over
/// the corpus and the ladder snapshots.
pub fn calibrate(spec: &ExperimentSpec) -> Result<Constants> {
    let members = corpus(spec)?;
    let mut c_cz: f64 = 0.0;
    for (_, w) in &members {
        for p in CZ_EXPONENTS {
            c_cz = c_cz.max(cz_ratio(w, p)?);
        }
    }
    let gamma_hat = 1.0 / (2.0 * std::f64::consts::E * c_cz);
    let mut c_k: f64 = 0.0;
    for (_, w) in &members {
        c_k = c_k.max(functionals(w, gamma_hat, w.max_abs())?.exp_integral);
    }
    let mut constants = Constants {
        gamma_hat: round_up(gamma_hat),
        c_cz: round_up(c_cz),
        c_k: round_up(c_k),
        exp_max: 0.0,
        cz_max: [0.0; 4],
        loglip_max: 0.0,
    };
    let m = Measurements::collect(spec, &constants, &members)?;
    constants.exp_max = round_up(m.exp_max);
    for (slot, v) in constants.cz_max.iter_mut().zip(m.cz_max) {
        *slot = round_up(v);
    }
    constants.loglip_max = round_up(m.loglip.iter().map(|l| l.1.max(l.2)).fold(0.0, f64::max));
    Ok(constants)
}

/// Everything the experiment measures, before any comparison.
struct Measurements {
    corpus: Vec<(String, FieldFunctionals)>,
    ladder: Vec<(f64, f64, FieldFunctionals)>,
    exp_max: f64,
    ladder_exp_max: f64,
    cz_max: [f64; 4],
    saturated: usize,
    /// `(label, C at pair_count, C at 2·pair_count)`.
    loglip: Vec<(String, f64, f64)>,
    runs: LadderRuns,
    omega0: ScalarField,
}

impl Measurements {
    fn collect(spec: &ExperimentSpec, constants: &Constants, members: &[(String, ScalarField)]) -> Result<Self> {
        let corpus = members
            .par_iter()
            .map(|(name, w)| Ok((name.clone(), functionals(w, constants.gamma_hat, w.max_abs())?)))
            .collect::<Result<Vec<_>>>()?;
        let omega0 = spec.initial_data()?;
        let runs = LadderRuns::run(&omega0, spec.ladder.values(), Stepping::of(spec))?;
        // Ω_∞ is the datum's sup norm for every member and time: the bound is uniform in ν
        let ladder = ladder_functionals(&runs, constants.gamma_hat, omega0.max_abs())?;

        let all = corpus.iter().map(|c| &c.1).chain(ladder.iter().map(|l| &l.2));
        let (mut exp_max, mut cz_max, mut saturated) = (0.0f64, [0.0f64; 4], 0);
        for f in all {
            exp_max = exp_max.max(f.exp_integral);
            for (m, v) in cz_max.iter_mut().zip(f.cz) {
                *m = m.max(v);
            }
            saturated += usize::from(f.saturated);
        }
        let ladder_exp_max = ladder.iter().map(|l| l.2.exp_integral).fold(0.0, f64::max);

        let seed = derive_seed(spec.seed, "loglip");
        let probes = [
            ("initial".to_string(), &omega0),
            (format!("{} at t = {}", nu_label(spec.ladder.smallest()), spec.t_end), runs.viscous.last().expect("nonempty ladder").last()),
        ];
        let loglip = probes
            .iter()
            .map(|(label, w)| {
                Ok((
                    label.clone(),
                    loglip(w, constants, spec.pair_count, seed)?,
                    loglip(w, constants, 2 * spec.pair_count, seed)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            corpus,
            ladder,
            exp_max,
            ladder_exp_max,
            cz_max,
            saturated,
            loglip,
            runs,
            omega0,
        })
    }
}

pub fn run(spec: &ExperimentSpec, constants: &Constants) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(spec.id);
    let members = corpus(spec)?;
    let m = Measurements::collect(spec, constants, &members)?;

    for (i, (_, f)) in m.corpus.iter().enumerate() {
        report.row(0.0, 0.0, format!("corpus_{i}_exp_integral"), f.exp_integral);
        for (p, v) in CZ_EXPONENTS.iter().zip(f.cz) {
            report.row(0.0, 0.0, format!("corpus_{i}_cz_p{p}"), v);
        }
    }
    let mut plot = Plot::new("exponential integral along the ladder", "t", "exp integral");
    for nu in std::iter::once(0.0).chain(m.runs.nus.iter().copied()) {
        let series: Vec<(f64, f64)> = m.ladder.iter().filter(|l| l.0 == nu).map(|l| (l.1, l.2.exp_integral)).collect();
        plot = plot.with_series(Series::new(nu_label(nu), series));
    }
    for (nu, t, f) in &m.ladder {
        report.row(*t, *nu, "exp_integral", f.exp_integral);
        for (p, v) in CZ_EXPONENTS.iter().zip(f.cz) {
            report.row(*t, *nu, format!("cz_p{p}"), v);
        }
    }
    report.plots.push(("exp_integral_vs_t".into(), plot));

    report.check(
        "exp_integral_bounded",
        m.ladder_exp_max <= constants.c_k && m.saturated == 0,
        format!(
            "ladder max {:.6e} vs C_K = {:.6e} at gamma = {:.4e}; {} saturated fields",
            m.ladder_exp_max, constants.c_k, constants.gamma_hat, m.saturated
        ),
    );
    report.check(
        "exp_integral_regression",
        m.exp_max <= constants.exp_max,
        format!("corpus and ladder max {:.6e} vs frozen {:.6e}", m.exp_max, constants.exp_max),
    );
    for ((p, v), frozen) in CZ_EXPONENTS.iter().zip(m.cz_max).zip(constants.cz_max) {
        report.check(
            format!("cz_regression_p{p}"),
            v <= frozen && v <= constants.c_cz,
            format!("max ratio {v:.6e} vs frozen {frozen:.6e} (C_CZ = {:.6e})", constants.c_cz),
        );
    }
    for (label, c1, c2) in &m.loglip {
        report.row(spec.t_end, 0.0, format!("loglip {label}"), *c1);
        let stable = c1.is_finite() && c2.is_finite() && (c2 - c1).abs() <= LOGLIP_STABILITY * c1;
        report.check(
            format!("loglip_stable {label}"),
            stable && c1.max(*c2) <= constants.loglip_max,
            format!("C = {c1:.6e} with {} pairs, {c2:.6e} with twice as many; frozen {:.6e}", spec.pair_count, constants.loglip_max),
        );
    }

    if spec.guard {
        let nu_min = spec.ladder.smallest();
        let coarse = m
            .ladder
            .iter()
            .filter(|l| l.0 == nu_min)
            .map(|l| l.2.exp_integral)
            .fold(0.0, f64::max);
        let gamma = constants.gamma_hat;
        let omega_inf = m.omega0.max_abs();
        report.guard = Some(resolution_guard(
            spec,
            &m.omega0,
            &format!("max_t exp integral at nu = {nu_min:e}"),
            coarse,
            |w, st| {
                let traj = yudovich::dynamics::evolve(w, &st.config(nu_min))?;
                let mut worst: f64 = 0.0;
                for f in traj.snapshots() {
                    worst = worst.max(exp_integral(&biot_savart(f)?, gamma / omega_inf).value);
                }
                Ok(worst)
            },
        )?);
    }
    report.runs = m.runs.summaries();
    Ok(report)
}
