//! Whole-pipeline checks through the public API: initial data, solver,
//! diagnostics, archive and particle maps.

use std::f64::consts::PI;

use proptest::prelude::*;
use yudovich::diagnostics::{
    casimir, distribution, energy, enstrophy, lp_distance, palinstrophy, wasserstein1,
};
use yudovich::dynamics::{evolve, SimulationConfig, Trajectory};
use yudovich::fields::{eigenmode, random_besov, random_besov_band, taylor_green};
use yudovich::grid::torus_distance;
use yudovich::lagrangian::{advect, back_to_labels, FlowParams};
use yudovich::spectral::{biot_savart, curl, divergence, resample};
use yudovich::GridSpec;

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

#[test]
fn heat_modes_decay_at_their_eigenvalue() {
    let g = grid(64);
    let nu = 0.05;
    for (w0, lambda) in [(eigenmode(2, g).unwrap(), 4.0), (taylor_green(g), 2.0)] {
        let run = evolve(&w0, &SimulationConfig::new(nu, 1e-2, 1.0).with_stride(25)).unwrap();
        for (t, w) in run.iter() {
            let want = w0.scaled((-lambda * nu * t).exp());
            assert!(w.sub(&want).max_abs() < 1e-9, "t = {t}");
        }
    }
}

#[test]
fn viscous_run_dissipates_enstrophy_through_palinstrophy() {
    let g = grid(64);
    let nu = 1e-2;
    let w0 = random_besov_band(1.0, 11, g, 6).unwrap();
    let run = evolve(&w0, &SimulationConfig::new(nu, 2.5e-3, 0.5)).unwrap();
    let rates: Vec<f64> = run.snapshots().iter().map(|w| 2.0 * nu * palinstrophy(w)).collect();
    let lost = enstrophy(run.initial()) - enstrophy(run.last());
    let integrated = yudovich::diagnostics::trapezoid(run.times(), &rates);
    assert!((lost - integrated).abs() < 1e-4 * lost, "{lost} vs {integrated}");
    assert!(energy(run.last()) < energy(run.initial()));
}

#[test]
fn inviscid_run_keeps_its_distribution() {
    let g = grid(128);
    let w0 = random_besov_band(1.0, 3, g, 8).unwrap();
    let run = evolve(&w0, &SimulationConfig::new(0.0, 1e-2, 1.0).with_stride(50)).unwrap();
    let pi0 = distribution(&w0);
    let w1 = wasserstein1(&distribution(run.last()), &pi0).unwrap();
    assert!(w1 < 1e-3, "{w1}");
    let drift = (casimir(run.last(), |y| y * y) - casimir(&w0, |y| y * y)).abs() / casimir(&w0, |y| y * y);
    assert!(drift < 1e-6, "{drift}");
}

#[test]
fn refined_datum_gives_the_same_early_solution() {
    let w0 = random_besov_band(1.0, 5, grid(64), 6).unwrap();
    let config = SimulationConfig::new(1e-2, 1e-2, 0.5);
    let coarse = evolve(&w0, &config).unwrap();
    let fine = evolve(&resample(&w0, grid(128)), &config).unwrap();
    let gap = lp_distance(&resample(coarse.last(), grid(128)), fine.last(), 2.0).unwrap();
    assert!(gap < 1e-8, "{gap}");
}

#[test]
fn stored_trajectories_reload_and_drive_particles() {
    let dir = tempfile::tempdir().unwrap();
    let run = evolve(&taylor_green(grid(32)), &SimulationConfig::new(0.0, 0.05, 0.5)).unwrap();
    run.write_dir(dir.path()).unwrap();
    let back = Trajectory::read_dir(dir.path()).unwrap();
    assert_eq!(back.times(), run.times());
    assert_eq!(back.snapshots(), run.snapshots());

    let archive = back.to_archive().unwrap();
    let params = FlowParams::new(0.0, 1, 1e-2, 0.5, 0);
    let points = vec![[1.0, 2.0], [PI, 0.3], [5.5, 4.0]];
    let labels = back_to_labels(&points, &archive, &params).unwrap().positions(0);
    let again = advect(&labels, &archive, &params).unwrap().positions(0);
    for (p, q) in points.iter().zip(&again) {
        assert!(torus_distance(*p, *q) < 1e-8, "{p:?} -> {q:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn velocity_is_divergence_free_and_recovers_vorticity(seed in any::<u64>(), s in 0.2f64..2.0) {
        let w = random_besov(s, seed, grid(32)).unwrap();
        let u = biot_savart(&w).unwrap();
        prop_assert!(divergence(&u).max_abs() < 1e-10);
        prop_assert!(curl(&u).sub(&w).max_abs() < 1e-10);
    }

    #[test]
    fn random_data_are_normalised_and_mean_free(seed in any::<u64>(), kmax in 1i64..10) {
        let w = random_besov_band(1.0, seed, grid(32), kmax).unwrap();
        prop_assert!((w.max_abs() - 1.0).abs() < 1e-12);
        prop_assert!(w.mean().abs() < 1e-12);
    }
}
