//! Initial-data factories: eigenmodes, Taylor–Green, power-law random
//! fields and vortex patches with smooth or fractal boundary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::ScalarField;
use crate::grid::{periodic_delta, torus_distance, GridSpec, TWO_PI};
use crate::spectral::{self, ops, Spectrum};

/// `sin(N x₁)`, a steady state of the inviscid equation.
pub fn eigenmode(n_mode: u32, grid: GridSpec) -> Result<ScalarField> {
    if n_mode == 0 || 3 * n_mode as usize >= grid.n() {
        return Err(invalid(
            "N",
            format!("mode {n_mode} outside the resolved band 1 <= N < {}/3", grid.n()),
        ));
    }
    let k = n_mode as f64;
    Ok(ScalarField::from_fn(grid, |x, _| (k * x).sin()))
}

/// `cos x₁ cos x₂`.
pub fn taylor_green(grid: GridSpec) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| x.cos() * y.cos())
}

/// Power-law random field with coefficients `|k|^{−(1+s)}` on the dealiased band.
pub fn random_besov(s: f64, seed: u64, grid: GridSpec) -> Result<ScalarField> {
    random_besov_band(s, seed, grid, grid.dealias_cutoff())
}

/// As [`random_besov`], restricted to `max(|k₁|, |k₂|) ≤ kmax`.
///
/// Phases are drawn ring by ring in order of `max(|k₁|, |k₂|)`, so the same
/// seed gives the same low modes on every grid. The field is rescaled to
/// `‖ω‖_∞ = 1`.
pub fn random_besov_band(s: f64, seed: u64, grid: GridSpec, kmax: i64) -> Result<ScalarField> {
    if !(s > 0.0) {
        return Err(invalid("s", format!("regularity must be positive, got {s}")));
    }
    let kmax = kmax.min(grid.dealias_cutoff());
    if kmax < 1 {
        return Err(invalid("kmax", "band must contain at least one nonzero mode"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = Spectrum::zeros(grid);
    let n = grid.n() as i64;
    let slot = |k1: i64, k2: i64| grid.idx(k1.rem_euclid(n) as usize, k2.rem_euclid(n) as usize);
    for ring in 1..=kmax {
        // canonical half of the ring: k₁ > 0, or k₁ = 0 and k₂ > 0
        let mut reps = Vec::new();
        for k1 in 0..=ring {
            for k2 in -ring..=ring {
                if k1.abs().max(k2.abs()) != ring || (k1 == 0 && k2 <= 0) {
                    continue;
                }
                reps.push((k1, k2));
            }
        }
        for (k1, k2) in reps {
            let phase = rng.random::<f64>() * TWO_PI;
            let kk = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let c = Complex64::from_polar(kk.powf(-(1.0 + s)), phase);
            spec.coeffs_mut()[slot(k1, k2)] = c;
            spec.coeffs_mut()[slot(-k1, -k2)] = c.conj();
        }
    }
    let f = ops(grid).inverse(&spec);
    let m = f.max_abs();
    Ok(f.scaled(1.0 / m).project_mean())
}

/// Shape of a vortex patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchShape {
    Disk { radius: f64 },
    /// Koch snowflake grown from an equilateral triangle with the given circumradius.
    Koch { iterations: u32, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSpec {
    pub shape: PatchShape,
    pub center: [f64; 2],
    pub amplitude: f64,
    /// Optional Gaussian pre-mollification scale.
    pub mollify: Option<f64>,
}

impl PatchSpec {
    pub fn disk(radius: f64) -> Self {
        Self {
            shape: PatchShape::Disk { radius },
            center: [std::f64::consts::PI; 2],
            amplitude: 1.0,
            mollify: None,
        }
    }

    pub fn koch(iterations: u32) -> Self {
        Self {
            shape: PatchShape::Koch {
                iterations,
                radius: 2.0,
            },
            center: [std::f64::consts::PI; 2],
            amplitude: 1.0,
            mollify: None,
        }
    }
}

/// Largest iteration count accepted below `n = 1024`.
pub const MAX_KOCH_ITERATIONS_COARSE: u32 = 7;

/// Vertices of the order-`iterations` Koch snowflake centred at the origin.
pub fn koch_polygon(iterations: u32, radius: f64) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = (0..3)
        .map(|i| {
            let a = std::f64::consts::FRAC_PI_2 - i as f64 * TWO_PI / 3.0;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect();
    // vertices run clockwise, so outward is to the left of each edge
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(pts.len() * 4);
        for i in 0..pts.len() {
            let a = pts[i];
            let b = pts[(i + 1) % pts.len()];
            let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
            let p = [a[0] + d[0], a[1] + d[1]];
            let q = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
            let (c, s) = (0.5, 3f64.sqrt() / 2.0);
            let tip = [p[0] + c * d[0] - s * d[1], p[1] + s * d[0] + c * d[1]];
            next.extend([a, p, tip, q]);
        }
        pts = next;
    }
    pts
}

/// Scanline even–odd fill of a polygon given relative to `center`.
fn rasterize_polygon(grid: GridSpec, poly: &[[f64; 2]], center: [f64; 2]) -> Vec<bool> {
    let n = grid.n();
    let mut mask = vec![false; grid.len()];
    let rel: Vec<f64> = (0..n).map(|j| periodic_delta(grid.coord(j), center[1])).collect();
    let mut crossings = Vec::new();
    for i in 0..n {
        let x = periodic_delta(grid.coord(i), center[0]);
        crossings.clear();
        for e in 0..poly.len() {
            let a = poly[e];
            let b = poly[(e + 1) % poly.len()];
            // half-open rule so shared vertices count once
            if (a[0] <= x) != (b[0] <= x) {
                let t = (x - a[0]) / (b[0] - a[0]);
                crossings.push(a[1] + t * (b[1] - a[1]));
            }
        }
        if crossings.is_empty() {
            continue;
        }
        crossings.sort_by(f64::total_cmp);
        for (j, &y) in rel.iter().enumerate() {
            if crossings.partition_point(|&c| c < y) % 2 == 1 {
                mask[i * n + j] = true;
            }
        }
    }
    mask
}

/// Rasterized indicator of the patch region.
pub fn patch_mask(spec: &PatchSpec, grid: GridSpec) -> Result<Vec<bool>> {
    match spec.shape {
        PatchShape::Disk { radius } => {
            if !(radius > 0.0 && radius < std::f64::consts::PI) {
                return Err(invalid("radius", format!("disk radius must lie in (0, π), got {radius}")));
            }
            Ok(grid
                .points()
                .map(|p| torus_distance(p, spec.center) < radius)
                .collect())
        }
        PatchShape::Koch { iterations, radius } => {
            if iterations > MAX_KOCH_ITERATIONS_COARSE && grid.n() < 1024 {
                return Err(Error::DegeneratePolygon {
                    iterations,
                    n: grid.n(),
                });
            }
            if !(radius > 0.0 && radius < std::f64::consts::PI) {
                return Err(invalid("radius", format!("koch radius must lie in (0, π), got {radius}")));
            }
            Ok(rasterize_polygon(grid, &koch_polygon(iterations, radius), spec.center))
        }
    }
}

/// `amplitude · 1_D`, mean-projected and optionally mollified.
pub fn vortex_patch(spec: &PatchSpec, grid: GridSpec) -> Result<ScalarField> {
    let mask = patch_mask(spec, grid)?;
    let inside = mask.iter().filter(|&&m| m).count();
    if inside == 0 || inside == mask.len() {
        return Err(invalid("shape", "patch area must lie strictly between 0 and the torus area"));
    }
    let values = mask.iter().map(|&m| if m { spec.amplitude } else { 0.0 }).collect();
    let mut f = ScalarField::new(grid, values)?.project_mean();
    if let Some(ell) = spec.mollify {
        f = spectral::mollify(&f, ell)?.project_mean();
    }
    Ok(f)
}

/// Cells of `mask` with at least one 4-neighbour of the other colour.
pub fn boundary_cells(mask: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; mask.len()];
    for i in 0..n {
        for j in 0..n {
            let m = mask[i * n + j];
            let nb = [
                mask[((i + 1) % n) * n + j],
                mask[((i + n - 1) % n) * n + j],
                mask[i * n + (j + 1) % n],
                mask[i * n + (j + n - 1) % n],
            ];
            out[i * n + j] = nb.iter().any(|&b| b != m);
        }
    }
    out
}

/// Box-counting fit: `(dimension, [(box size in cells, occupied boxes)])`.
pub fn box_counting_dimension(cells: &[bool], n: usize, sizes: &[usize]) -> (f64, Vec<(usize, usize)>) {
    let counts: Vec<(usize, usize)> = sizes
        .iter()
        .map(|&s| {
            let nb = n / s;
            let mut occ = vec![false; nb * nb];
            for i in 0..n {
                for j in 0..n {
                    if cells[i * n + j] {
                        occ[(i / s) * nb + j / s] = true;
                    }
                }
            }
            (s, occ.iter().filter(|&&o| o).count())
        })
        .collect();
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .map(|&(s, c)| ((1.0 / s as f64).ln(), (c as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{besov_seminorm, lp_norm};
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn eigenmode_examples() {
        let g = grid(64);
        let e1 = eigenmode(1, g).unwrap();
        assert_eq!(e1.at(16, 3), g.coord(16).sin());
        for n_mode in [1, 5, 20] {
            let e = eigenmode(n_mode, g).unwrap();
            assert!(e.mean().abs() < 1e-15);
            assert!((lp_norm(&e, 2.0).unwrap() - (2.0 * PI * PI).sqrt()).abs() < 1e-12);
        }
        assert!(eigenmode(0, g).is_err());
        assert!(eigenmode(22, g).is_err());
    }

    #[test]
    fn random_besov_is_deterministic_and_normalised() {
        let g = grid(64);
        let a = random_besov(0.5, 9, g).unwrap();
        let b = random_besov(0.5, 9, g).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_besov(0.5, 10, g).unwrap());
        assert!((a.max_abs() - 1.0).abs() < 1e-12);
        assert!(a.mean().abs() < 1e-15);
    }

    #[test]
    fn random_besov_follows_the_power_law() {
        let g = grid(128);
        let s = 0.7;
        let f = random_besov(s, 4, g).unwrap();
        let spec = ops(g).forward(&f);
        // shell-averaged amplitude over integer shells 2 ≤ |k| < 40
        let mut sums = vec![(0.0, 0usize); 40];
        for m1 in 0..g.n() {
            for m2 in 0..g.n() {
                let (k1, k2) = (g.wavenumber(m1), g.wavenumber(m2));
                let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
                let shell = r.floor() as usize;
                if (2..40).contains(&shell) {
                    sums[shell].0 += spec.coeffs()[m1 * g.n() + m2].norm();
                    sums[shell].1 += 1;
                }
            }
        }
        let pts: Vec<(f64, f64)> = (2..40)
            .map(|k| ((k as f64 + 0.5).ln(), (sums[k].0 / sums[k].1 as f64).ln()))
            .collect();
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 1.0 + s).abs() < 0.1, "slope {slope}");
    }

    /// Dyadic-sum oracle: `sup_j 2^{js}(4π² Σ ψ_j²(k)|k|^{−2(1+σ)})^{1/2}` over the
    /// band of `random_besov(σ)` on an `n`-grid, divided by the same field's L² norm.
    fn prescribed_ratio(n: usize, sigma: f64, s: f64) -> f64 {
        let kmax = (n / 3) as i64;
        let jmax = crate::diagnostics::max_block(n);
        let mut blocks = vec![0.0; (jmax + 2) as usize];
        let mut total = 0.0;
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
                let a2 = r.powf(-2.0 * (1.0 + sigma));
                total += a2;
                for j in -1..=jmax {
                    blocks[(j + 1) as usize] += crate::diagnostics::block_multiplier(j, r).powi(2) * a2;
                }
            }
        }
        let sup = (-1..=jmax)
            .map(|j| (j as f64 * s).exp2() * blocks[(j + 1) as usize].sqrt())
            .fold(0.0, f64::max);
        sup / total.sqrt()
    }

    #[test]
    fn besov_regularity_is_sharp() {
        // the scale-free ratio seminorm / ‖f‖₂ is fixed by the prescribed moduli
        let measured = |n: usize, s: f64| {
            let f = random_besov(0.5, 21, grid(n)).unwrap();
            let semi = besov_seminorm(&f, s, 2.0).unwrap().seminorm;
            (semi, semi / crate::diagnostics::lp_norm(&f, 2.0).unwrap())
        };
        let mut at_half = Vec::new();
        for n in [128, 256, 512] {
            let (semi, ratio) = measured(n, 0.5);
            let oracle = prescribed_ratio(n, 0.5, 0.5);
            assert!((ratio - oracle).abs() < 1e-9 * oracle, "n = {n}: {ratio} vs {oracle}");
            at_half.push(semi);
        }
        let (lo, hi) = at_half.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi / lo <= 2.0, "{at_half:?}");

        // half a derivative more diverges: exact dyadic scaling gives 2 per factor 4
        // in n, and lattice effects leave the prescribed spectrum at 1.99
        let ratios: Vec<f64> = [128, 256, 512, 1024].iter().map(|&n| measured(n, 1.0).1).collect();
        for (n, r) in [128, 256, 512, 1024].iter().zip(&ratios) {
            let oracle = prescribed_ratio(*n, 0.5, 1.0);
            assert!((r - oracle).abs() < 1e-9 * oracle, "n = {n}: {r} vs {oracle}");
        }
        assert!(ratios.windows(2).all(|w| w[1] > 1.3 * w[0]), "{ratios:?}");
        let growth = ratios[2] / ratios[0];
        assert!(growth > 1.98, "growth {growth}");
        assert!(ratios[3] / ratios[0] > 2.8);
    }

    #[test]
    fn disk_patch_values_and_area() {
        let n = 128;
        let g = grid(n);
        let r = 1.0;
        let f = vortex_patch(&PatchSpec::disk(r), g).unwrap();
        let frac = PI * r * r / (4.0 * PI * PI);
        let hi = f.values().iter().cloned().fold(f64::MIN, f64::max);
        let lo = f.values().iter().cloned().fold(f64::MAX, f64::min);
        let measured = -lo;
        assert!((measured - frac).abs() <= 2.0 / n as f64);
        assert!((hi - lo - 1.0).abs() < 1e-14);
        assert!(f.mean().abs() < 1e-14);
        assert!(f.max_abs() <= 1.0 + frac);
    }

    #[test]
    fn koch_base_case_is_a_triangle() {
        let poly = koch_polygon(0, 2.0);
        assert_eq!(poly.len(), 3);
        assert_eq!(koch_polygon(3, 2.0).len(), 3 * 64);
        let g = grid(256);
        let mask = patch_mask(&PatchSpec::koch(0), g).unwrap();
        let area = mask.iter().filter(|&&m| m).count() as f64 * g.cell_area();
        let exact = 3.0 * 3f64.sqrt() / 4.0 * 4.0;
        assert!((area - exact).abs() / exact < 0.02, "{area} vs {exact}");
        // snowflake area is 8/5 of the triangle in the limit
        let m5 = patch_mask(&PatchSpec::koch(5), g).unwrap();
        let a5 = m5.iter().filter(|&&m| m).count() as f64 * g.cell_area();
        assert!((a5 / exact - 1.6).abs() < 0.02, "ratio {}", a5 / exact);
    }

    #[test]
    fn coarse_high_order_koch_is_rejected() {
        let r = vortex_patch(&PatchSpec::koch(8), grid(512));
        assert!(matches!(r, Err(Error::DegeneratePolygon { iterations: 8, n: 512 })));
    }

    #[test]
    fn box_counting_recovers_simple_dimensions() {
        let n = 256;
        let line: Vec<bool> = (0..n * n).map(|i| i / n == 100).collect();
        let (d, _) = box_counting_dimension(&line, n, &[1, 2, 4, 8, 16]);
        assert!((d - 1.0).abs() < 1e-12);
        let full = vec![true; n * n];
        let (d2, _) = box_counting_dimension(&full, n, &[1, 2, 4, 8, 16]);
        assert!((d2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn koch_boundary_dimension() {
        let n = 1024;
        let mask = patch_mask(&PatchSpec::koch(5), grid(n)).unwrap();
        let edge = boundary_cells(&mask, n);
        let (d, counts) = box_counting_dimension(&edge, n, &[4, 8, 16, 32, 64]);
        assert!((1.20..=1.32).contains(&d), "D = {d}, counts {counts:?}");
    }
}
