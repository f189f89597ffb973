use std::f64::consts::PI;

use super::*;
use crate::archive::VelocityArchive;
use crate::dynamics::{evolve, SimulationConfig};
use crate::error::Error;
use crate::field::ScalarField;
use crate::fields::taylor_green;
use crate::grid::{torus_distance, GridSpec, TWO_PI};
use crate::interp::bicubic;
use crate::spectral::biot_savart;

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n).unwrap()
}

fn tg_velocity(p: [f64; 2], _: f64) -> [f64; 2] {
    [-0.5 * p[0].cos() * p[1].sin(), 0.5 * p[0].sin() * p[1].cos()]
}

fn rotation(p: [f64; 2], _: f64) -> [f64; 2] {
    [-(p[1] - PI), p[0] - PI]
}

fn labels(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let a = i as f64 * 0.618_033_988_749_894_9;
            [TWO_PI * a.fract(), TWO_PI * (0.37 * i as f64 + 0.11).fract()]
        })
        .collect()
}

#[test]
fn zero_velocity_without_noise_is_the_identity() {
    let archive = VelocityArchive::zeros(grid(16), 1.0, 0.1).unwrap();
    let pts = labels(10);
    let ens = advect(&pts, &archive, &FlowParams::new(0.0, 3, 0.1, 1.0, 7)).unwrap();
    for r in 0..3 {
        assert_eq!(ens.unwrapped[r], pts);
    }
}

#[test]
fn brownian_displacement_variance() {
    let nu = 0.5;
    let archive = VelocityArchive::zeros(grid(16), 1.0, 0.1).unwrap();
    let ens = advect(&[[1.0, 2.0]], &archive, &FlowParams::new(nu, 4000, 0.1, 1.0, 11)).unwrap();
    let mut sx = RunningStats::default();
    let mut sy = RunningStats::default();
    for r in 0..ens.realizations() {
        let d = ens.displacement(r, 0);
        sx.push(d[0]);
        sy.push(d[1]);
    }
    // variance 2νt, estimated to about 2.2% relative standard error
    for s in [&sx, &sy] {
        assert!((s.variance() - 1.0).abs() < 0.1, "{}", s.variance());
        assert!(s.mean().abs() < 5.0 * s.std_error());
    }
}

#[test]
fn noise_is_shared_by_all_labels() {
    let archive = VelocityArchive::zeros(grid(16), 1.0, 0.1).unwrap();
    let pts = labels(5);
    let ens = advect(&pts, &archive, &FlowParams::new(0.3, 4, 0.1, 1.0, 2)).unwrap();
    for r in 0..4 {
        let d0 = ens.displacement(r, 0);
        for i in 1..pts.len() {
            let d = ens.displacement(r, i);
            assert!((d[0] - d0[0]).abs() < 1e-12 && (d[1] - d0[1]).abs() < 1e-12);
        }
    }
    assert_ne!(ens.displacement(0, 0), ens.displacement(1, 0));
}

#[test]
fn rigid_rotation_returns_after_one_period() {
    let pts = vec![[PI + 1.0, PI], [PI, PI + 0.5], [PI - 0.3, PI + 0.4]];
    for (scheme, tol) in [(Scheme::Heun, 1e-4), (Scheme::EulerMaruyama, 0.2)] {
        let params = FlowParams::new(0.0, 1, TWO_PI / 1000.0, TWO_PI, 0).with_scheme(scheme);
        let ens = advect(&pts, &AnalyticVelocity(rotation), &params).unwrap();
        for (p, l) in ens.unwrapped[0].iter().zip(&pts) {
            let r0 = ((l[0] - PI).powi(2) + (l[1] - PI).powi(2)).sqrt();
            assert!(torus_distance(*p, *l) < tol * r0.max(1.0), "{scheme:?}: {p:?} vs {l:?}");
        }
    }
}

#[test]
fn taylor_green_round_trip() {
    let g = grid(32);
    let u = biot_savart(&taylor_green(g)).unwrap();
    let archive = VelocityArchive::steady(u, 2.0, 0.5).unwrap();
    let params = FlowParams::new(0.0, 1, 1e-2, 2.0, 0);
    let pts = labels(40);
    let fwd = advect(&pts, &archive, &params).unwrap();
    let back = back_to_labels(&fwd.positions(0), &archive, &params).unwrap();
    for (p, l) in back.positions(0).iter().zip(&pts) {
        assert!(torus_distance(*p, *l) < 1e-6, "{p:?} vs {l:?}");
    }
    // archived and analytic velocities agree up to interpolation error
    let analytic = advect(&pts, &AnalyticVelocity(tg_velocity), &params).unwrap();
    for (a, b) in analytic.positions(0).iter().zip(fwd.positions(0)) {
        assert!(torus_distance(*a, b) < 1e-4);
    }
}

#[test]
fn deterministic_flow_preserves_area() {
    let m = 96;
    let (x0, side) = (0.7, 1.5);
    let mesh: Vec<[f64; 2]> = (0..=m)
        .flat_map(|i| (0..=m).map(move |j| [x0 + side * i as f64 / m as f64, x0 + side * j as f64 / m as f64]))
        .collect();
    let params = FlowParams::new(0.0, 1, 1e-2, 3.0, 0);
    let ens = advect(&mesh, &AnalyticVelocity(tg_velocity), &params).unwrap();
    let p = &ens.unwrapped[0];
    let at = |i: usize, j: usize| p[i * (m + 1) + j];
    let tri = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
    let mut area = 0.0;
    for i in 0..m {
        for j in 0..m {
            area += tri(at(i, j), at(i + 1, j), at(i + 1, j + 1)) + tri(at(i, j), at(i + 1, j + 1), at(i, j + 1));
        }
    }
    assert!((area - side * side).abs() < 1e-3 * side * side, "area {area}");
}

#[test]
fn heat_kernel_average_of_a_mode() {
    let g = grid(64);
    let nu = 0.05;
    let omega0 = ScalarField::from_fn(g, |x, _| x.sin());
    let archive = VelocityArchive::zeros(g, 1.0, 0.1).unwrap().with_provenance(nu, false);
    let pts: Vec<[f64; 2]> = (0..8).map(|i| [0.3 + 0.7 * i as f64, 1.0]).collect();
    let est = mc_vorticity(&omega0, &archive, &FlowParams::new(nu, 3000, 0.1, 1.0, 5), &pts).unwrap();
    for (e, p) in est.iter().zip(&pts) {
        let exact = p[0].sin() * (-nu).exp();
        assert!((e.mean - exact).abs() < 5.0 * e.std_error + 1e-6, "{} vs {exact} (se {})", e.mean, e.std_error);
    }
}

#[test]
fn vanishing_noise_gives_the_deterministic_value() {
    let g = grid(32);
    let omega0 = ScalarField::from_fn(g, |x, y| (x - 2.0 * y).sin());
    let archive = VelocityArchive::zeros(g, 1.0, 0.1).unwrap().with_provenance(0.0, false);
    let pts = labels(6);
    let est = mc_vorticity(&omega0, &archive, &FlowParams::new(0.0, 10, 0.1, 1.0, 5), &pts).unwrap();
    for (e, p) in est.iter().zip(&pts) {
        assert!((e.mean - bicubic(g, omega0.values(), *p)).abs() < 1e-14);
        assert!((e.mean - (p[0] - 2.0 * p[1]).sin()).abs() < 5e-3);
        assert!(e.variance < 1e-24);
    }
}

#[test]
fn archive_provenance_is_enforced() {
    let g = grid(16);
    let omega0 = ScalarField::from_fn(g, |x, _| x.sin());
    let params = FlowParams::new(0.1, 4, 0.1, 1.0, 0);
    let forced = VelocityArchive::zeros(g, 1.0, 0.1).unwrap().with_provenance(0.1, true);
    assert!(matches!(mc_vorticity(&omega0, &forced, &params, &[[0.0, 0.0]]), Err(Error::ForcedArchive)));
    let other = VelocityArchive::zeros(g, 1.0, 0.1).unwrap().with_provenance(0.2, false);
    assert!(matches!(
        mc_vorticity(&omega0, &other, &params, &[[0.0, 0.0]]),
        Err(Error::ViscosityMismatch { .. })
    ));
    let short = VelocityArchive::zeros(g, 0.5, 0.1).unwrap();
    assert!(matches!(mc_vorticity(&omega0, &short, &params, &[[0.0, 0.0]]), Err(Error::Coverage { .. })));
}

#[test]
fn fluctuation_dissipation_for_a_shear() {
    // sin x₁ has u₁ = 0, so A_t¹ is Brownian and both sides equal π²(1 − e^{−2νt})
    let g = grid(32);
    let nu = 0.05;
    let omega0 = ScalarField::from_fn(g, |x, _| x.sin());
    let traj = evolve(&omega0, &SimulationConfig::new(nu, 0.05, 1.0)).unwrap();
    let exact = PI * PI * (1.0 - (-2.0 * nu).exp());
    let mut opts = FdrOptions::new(400, 0.05, 3);
    opts.subgrid = 8;
    let report = fdr_check(&traj, &opts).unwrap();
    assert!((report.lhs - exact).abs() < 1e-3 * exact, "lhs {} vs {exact}", report.lhs);
    assert!(report.gap() < 4.0 * report.std_error, "{report:?}");
    assert!(report.std_error < 0.2 * exact);

    let inviscid = evolve(&omega0, &SimulationConfig::new(0.0, 0.05, 1.0)).unwrap();
    assert!(matches!(fdr_check(&inviscid, &opts), Err(Error::Inviscid)));
}

#[test]
fn separation_exponent_of_rigid_motions() {
    let opts = SeparationOptions {
        delta0: vec![1e-3, 1e-2, 1e-1],
        times: vec![0.5, 1.0],
        base_points: 4,
    };
    let archive = VelocityArchive::zeros(grid(16), 1.0, 0.1).unwrap();
    let fits = pair_separation(&archive, &FlowParams::new(0.2, 8, 0.1, 1.0, 1), &opts).unwrap();
    for f in &fits {
        assert!((f.alpha - 1.0).abs() < 1e-9, "{f:?}");
    }
    let fits = pair_separation(&AnalyticVelocity(rotation), &FlowParams::new(0.0, 1, 1e-2, 1.0, 1), &opts).unwrap();
    for f in &fits {
        assert!((f.alpha - 1.0).abs() < 1e-6, "{f:?}");
        assert!(f.r_squared > 1.0 - 1e-9);
    }
    let narrow = SeparationOptions {
        delta0: vec![1e-2, 1e-1],
        ..opts
    };
    assert!(pair_separation(&archive, &FlowParams::new(0.2, 8, 0.1, 1.0, 1), &narrow).is_err());
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let g = grid(32);
    let nu = 0.02;
    let omega0 = taylor_green(g);
    let traj = evolve(&omega0, &SimulationConfig::new(nu, 0.1, 1.0)).unwrap();
    let archive = traj.to_archive().unwrap();
    let pts = labels(5);
    let params = FlowParams::new(nu, 300, 0.1, 1.0, 99);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| mc_vorticity(&omega0, &archive, &params, &pts).unwrap())
    };
    assert_eq!(run(1), run(3));
    let again = mc_vorticity(&omega0, &archive, &params, &pts).unwrap();
    assert_eq!(run(1), again);
    let other_seed = mc_vorticity(&omega0, &archive, &FlowParams { seed: 100, ..params }, &pts).unwrap();
    assert_ne!(again, other_seed);
}
