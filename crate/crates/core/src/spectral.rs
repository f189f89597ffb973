//! Fourier transforms and spectral operators on the periodic grid.
//!
//! Coefficients are normalised so that `f(x) = Σ_k f̂_k e^{i k·x}`; bin
//! `(m₁, m₂)` is stored at `m₁·n + m₂`. Derivative symbols vanish on the
//! Nyquist bins so that derivatives of real fields stay real.
//!
//! Velocity convention: `Δψ = ω`, `u = ∇⊥ψ = (−∂₂ψ, ∂₁ψ)`, hence `curl u = ∂₁u₂ − ∂₂u₁ = ω`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::GridSpec;

/// Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub(crate) fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient of the integer mode `(k₁, k₂)`, both in `[-n/2, n/2)`.
    pub fn mode(&self, k1: i64, k2: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        let m1 = k1.rem_euclid(n) as usize;
        let m2 = k2.rem_euclid(n) as usize;
        self.coeffs[self.grid.idx(m1, m2)]
    }

    /// `Σ_k |f̂_k|²`; times `4π²` this is `‖f‖₂²`.
    pub fn power(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Multiplies every coefficient by `symbol(k₁, k₂)`.
    pub fn apply(&self, symbol: impl Fn(i64, i64) -> Complex64) -> Self {
        let g = self.grid;
        let n = g.n();
        let mut coeffs = self.coeffs.clone();
        for m1 in 0..n {
            let k1 = g.wavenumber(m1);
            for m2 in 0..n {
                coeffs[m1 * n + m2] *= symbol(k1, g.wavenumber(m2));
            }
        }
        Self { grid: g, coeffs }
    }

    /// Multiplies by a real radial symbol `σ(|k|)`.
    pub fn apply_radial(&self, symbol: impl Fn(f64) -> f64) -> Self {
        self.apply(|k1, k2| Complex64::new(symbol(((k1 * k1 + k2 * k2) as f64).sqrt()), 0.0))
    }
}

/// FFT plans and wavenumber tables for one grid size.
pub struct SpectralOps {
    grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// Wavenumber per bin.
    pub(crate) k: Vec<f64>,
    /// Derivative wavenumber per bin (zero on the Nyquist bin).
    pub(crate) kd: Vec<f64>,
}

static OPS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpectralOps>>>> = OnceLock::new();

/// Shared, lazily planned operators for `grid`.
pub fn ops(grid: GridSpec) -> Arc<SpectralOps> {
    let cache = OPS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("spectral cache poisoned");
    map.entry(grid.n())
        .or_insert_with(|| Arc::new(SpectralOps::new(grid)))
        .clone()
}

const PAR_MIN_N: usize = 128;

impl SpectralOps {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let k: Vec<f64> = (0..n).map(|m| grid.wavenumber(m) as f64).collect();
        let kd = (0..n)
            .map(|m| if m == n / 2 { 0.0 } else { k[m] })
            .collect();
        Self {
            grid,
            fwd,
            inv,
            k,
            kd,
        }
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    fn fft_rows(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        let plan = if inverse { &self.inv } else { &self.fwd };
        if n >= PAR_MIN_N && rayon::current_num_threads() > 1 {
            let rows_per_task = (n / rayon::current_num_threads()).clamp(8, n);
            buf.par_chunks_mut(rows_per_task * n).for_each_init(
                || vec![Complex64::default(); plan.get_inplace_scratch_len()],
                |scratch, chunk| plan.process_with_scratch(chunk, scratch),
            );
        } else {
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(buf, &mut scratch);
        }
    }

    /// Unnormalised 2D transform in place; each row is transformed by the
    /// same plan whatever the thread count, so results are bit-identical.
    pub(crate) fn fft2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.grid.n();
        self.fft_rows(buf, inverse);
        transpose_in_place(buf, n);
        self.fft_rows(buf, inverse);
        transpose_in_place(buf, n);
    }

    pub fn forward(&self, f: &ScalarField) -> Spectrum {
        let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, false);
        let scale = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Spectrum::from_raw(self.grid, buf)
    }

    pub fn inverse(&self, s: &Spectrum) -> ScalarField {
        let mut buf = s.coeffs.clone();
        self.fft2(&mut buf, true);
        let values = buf.into_iter().map(|c| c.re).collect();
        ScalarField::new(self.grid, values).expect("grid-sized buffer")
    }

    /// Inverts two Hermitian spectra with a single complex transform.
    pub fn inverse_pair(&self, a: &Spectrum, b: &Spectrum) -> (ScalarField, ScalarField) {
        let i = Complex64::new(0.0, 1.0);
        let packed = a.coeffs.iter().zip(&b.coeffs).map(|(&p, &q)| p + i * q).collect();
        self.inverse_packed(packed)
    }

    pub(crate) fn inverse_packed(&self, mut packed: Vec<Complex64>) -> (ScalarField, ScalarField) {
        self.fft2(&mut packed, true);
        let (re, im): (Vec<f64>, Vec<f64>) = packed.into_iter().map(|c| (c.re, c.im)).unzip();
        (
            ScalarField::new(self.grid, re).expect("grid-sized buffer"),
            ScalarField::new(self.grid, im).expect("grid-sized buffer"),
        )
    }

    /// Packed spectrum `∂₁f̂ + i ∂₂f̂`.
    pub(crate) fn packed_gradient(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut out = vec![Complex64::default(); n * n];
        for m1 in 0..n {
            let k1 = self.kd[m1];
            for m2 in 0..n {
                let c = f[m1 * n + m2];
                let k2 = self.kd[m2];
                // i k₁ c + i (i k₂ c) = i k₁ c − k₂ c
                out[m1 * n + m2] = Complex64::new(-k1 * c.im, k1 * c.re) - k2 * c;
            }
        }
        out
    }

    /// Packed velocity spectrum `û₁ + i û₂` from vorticity coefficients.
    pub(crate) fn packed_velocity(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut out = vec![Complex64::default(); n * n];
        for m1 in 0..n {
            let k1 = self.k[m1];
            let kd1 = self.kd[m1];
            for m2 in 0..n {
                let k2 = self.k[m2];
                let kk = k1 * k1 + k2 * k2;
                if kk == 0.0 {
                    continue;
                }
                let c = w[m1 * n + m2] / kk;
                let kd2 = self.kd[m2];
                // û₁ = i k₂ ω̂/|k|², û₂ = −i k₁ ω̂/|k|²
                let u1 = Complex64::new(-kd2 * c.im, kd2 * c.re);
                let u2 = Complex64::new(kd1 * c.im, -kd1 * c.re);
                out[m1 * n + m2] = u1 + Complex64::new(-u2.im, u2.re);
            }
        }
        out
    }

    /// Velocity from vorticity coefficients; the mean mode is ignored.
    pub fn velocity_from_spectrum(&self, w: &Spectrum) -> VectorField {
        let (x, y) = self.inverse_packed(self.packed_velocity(&w.coeffs));
        VectorField { x, y }
    }

    pub fn gradient_from_spectrum(&self, f: &Spectrum) -> VectorField {
        let (x, y) = self.inverse_packed(self.packed_gradient(&f.coeffs));
        VectorField { x, y }
    }

    /// Zeroes modes with `max(|k₁|, |k₂|) > n/3`.
    pub(crate) fn dealias_in_place(&self, c: &mut [Complex64]) {
        let n = self.grid.n();
        let cut = self.grid.dealias_cutoff() as f64;
        for m1 in 0..n {
            let k1 = self.k[m1].abs();
            for m2 in 0..n {
                if k1 > cut || self.k[m2].abs() > cut {
                    c[m1 * n + m2] = Complex64::default();
                }
            }
        }
    }
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (ib..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                let jstart = if ib == jb { i + 1 } else { jb };
                for j in jstart..(jb + B).min(n) {
                    buf.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

pub(crate) fn mean_check(f: &ScalarField) -> Result<()> {
    let mean = f.mean();
    if mean.abs() > 1e-12 * f.max_abs() {
        return Err(Error::MeanViolation { mean });
    }
    Ok(())
}

/// Velocity `u = ∇⊥Δ⁻¹ω` with `curl u = ω`; rejects fields with nonzero mean.
pub fn biot_savart(omega: &ScalarField) -> Result<VectorField> {
    mean_check(omega)?;
    let o = ops(omega.grid());
    Ok(o.velocity_from_spectrum(&o.forward(omega)))
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let o = ops(f.grid());
    o.gradient_from_spectrum(&o.forward(f))
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    let o = ops(f.grid());
    let s = o.forward(f).apply(|k1, k2| Complex64::new(-((k1 * k1 + k2 * k2) as f64), 0.0));
    o.inverse(&s)
}

/// Scalar curl `∂₁u₂ − ∂₂u₁`.
pub fn curl(u: &VectorField) -> ScalarField {
    let o = ops(u.grid());
    let d1u2 = o.gradient_from_spectrum(&o.forward(&u.y)).x;
    let d2u1 = o.gradient_from_spectrum(&o.forward(&u.x)).y;
    d1u2.sub(&d2u1)
}

pub fn divergence(u: &VectorField) -> ScalarField {
    let o = ops(u.grid());
    let d1u1 = o.gradient_from_spectrum(&o.forward(&u.x)).x;
    let d2u2 = o.gradient_from_spectrum(&o.forward(&u.y)).y;
    d1u1.add(&d2u2)
}

/// Gaussian mollifier: multiplies mode `k` by `exp(−(ℓ|k|)²/2)`.
pub fn mollify(f: &ScalarField, ell: f64) -> Result<ScalarField> {
    if !(ell > 0.0) {
        return Err(invalid("ell", format!("mollification scale must be positive, got {ell}")));
    }
    let o = ops(f.grid());
    let s = o.forward(f).apply_radial(|k| (-0.5 * (ell * k).powi(2)).exp());
    Ok(o.inverse(&s))
}

/// 2/3-rule truncation.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let o = ops(f.grid());
    let mut s = o.forward(f);
    o.dealias_in_place(&mut s.coeffs);
    o.inverse(&s)
}

/// Spectral interpolation onto another grid (zero padding or truncation).
pub fn resample(f: &ScalarField, target: GridSpec) -> ScalarField {
    let src = f.grid();
    if src == target {
        return f.clone();
    }
    let s = ops(src).forward(f);
    let half = (src.n().min(target.n()) / 2) as i64;
    let mut out = Spectrum::zeros(target);
    let nt = target.n() as i64;
    for m1 in 0..src.n() {
        let k1 = src.wavenumber(m1);
        for m2 in 0..src.n() {
            let k2 = src.wavenumber(m2);
            // the shared Nyquist line is dropped to keep the result real
            if k1.abs() >= half || k2.abs() >= half {
                continue;
            }
            let t = target.idx(k1.rem_euclid(nt) as usize, k2.rem_euclid(nt) as usize);
            out.coeffs[t] = s.coeffs[src.idx(m1, m2)];
        }
    }
    ops(target).inverse(&out)
}

/// Exact evaluation of the trigonometric interpolant at arbitrary points.
///
/// Nyquist bins are evaluated as `cos(n x / 2)` so the interpolant stays real.
pub struct SpectralInterpolant {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralInterpolant {
    pub fn new(f: &ScalarField) -> Self {
        let s = ops(f.grid()).forward(f);
        Self {
            grid: f.grid(),
            coeffs: s.coeffs,
        }
    }

    fn phases(&self, x: f64) -> Vec<Complex64> {
        let n = self.grid.n();
        (0..n)
            .map(|m| {
                if m == n / 2 {
                    Complex64::new((0.5 * n as f64 * x).cos(), 0.0)
                } else {
                    Complex64::from_polar(1.0, self.grid.wavenumber(m) as f64 * x)
                }
            })
            .collect()
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let n = self.grid.n();
        let e1 = self.phases(p[0]);
        let e2 = self.phases(p[1]);
        let mut total = Complex64::default();
        for (m1, ph1) in e1.iter().enumerate() {
            let row = &self.coeffs[m1 * n..(m1 + 1) * n];
            let inner: Complex64 = row.iter().zip(&e2).map(|(c, ph2)| c * ph2).sum();
            total += inner * ph1;
        }
        total.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    /// Random zero-mean field with modes |k_i| <= kmax.
    fn random_band_limited(g: GridSpec, kmax: i64, seed: u64) -> ScalarField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for k1 in 0..=kmax {
            for k2 in -kmax..=kmax {
                if k1 == 0 && k2 <= 0 {
                    continue;
                }
                terms.push((k1 as f64, k2 as f64, rng.random_range(-1.0..1.0), rng.random_range(0.0..2.0 * PI)));
            }
        }
        ScalarField::from_fn(g, |x, y| terms.iter().map(|&(a, b, amp, ph)| amp * (a * x + b * y + ph).cos()).sum())
    }

    fn max_diff(a: &ScalarField, b: &ScalarField) -> f64 {
        a.sub(b).max_abs()
    }

    #[test]
    fn round_trip_is_exact_to_roundoff() {
        let g = grid(64);
        let f = random_band_limited(g, 20, 1);
        let o = ops(g);
        let back = o.inverse(&o.forward(&f));
        assert!(max_diff(&back, &f) <= 1e-12 * f.max_abs());
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        let g = grid(32);
        let o = ops(g);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let vals: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = ScalarField::new(g, vals).unwrap();
            let grid_side: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.cell_area();
            let spec_side = o.forward(&f).power() * g.area();
            assert!((grid_side - spec_side).abs() <= 1e-12 * grid_side);
        }
    }

    #[test]
    fn biot_savart_zero_and_single_modes() {
        let g = grid(64);
        let u = biot_savart(&ScalarField::zeros(g)).unwrap();
        assert_eq!(u.max_norm(), 0.0);

        for n_mode in [1.0, 2.0, 5.0, 13.0] {
            let w = ScalarField::from_fn(g, |x, _| (n_mode * x).sin());
            let u = biot_savart(&w).unwrap();
            let want_y = ScalarField::from_fn(g, |x, _| -(n_mode * x).cos() / n_mode);
            assert!(u.x.max_abs() < 1e-14);
            assert!(max_diff(&u.y, &want_y) < 1e-14);
        }
    }

    #[test]
    fn biot_savart_rejects_mean() {
        let g = grid(32);
        let w = ScalarField::from_fn(g, |x, _| 0.5 + x.sin());
        match biot_savart(&w) {
            Err(Error::MeanViolation { mean }) => assert!((mean - 0.5).abs() < 1e-12),
            other => panic!("expected mean violation, got {other:?}"),
        }
    }

    #[test]
    fn curl_and_divergence_of_biot_savart() {
        let g = grid(64);
        for seed in 0..5 {
            let w = random_band_limited(g, 21, seed).project_mean();
            let u = biot_savart(&w).unwrap();
            assert!(max_diff(&curl(&u), &w) <= 1e-10 * w.max_abs());
            assert!(divergence(&u).max_abs() <= 1e-10 * u.max_norm());
        }
    }

    #[test]
    fn gradient_examples() {
        let g = grid(32);
        let c = gradient(&ScalarField::constant(g, 3.0));
        assert!(c.max_norm() < 1e-14);
        let s = gradient(&ScalarField::from_fn(g, |x, _| x.sin()));
        assert!(max_diff(&s.x, &ScalarField::from_fn(g, |x, _| x.cos())) < 1e-13);
        assert!(s.y.max_abs() < 1e-13);
        let f = gradient(&ScalarField::from_fn(g, |x, y| (3.0 * x).sin() * (2.0 * y).cos()));
        let want_x = ScalarField::from_fn(g, |x, y| 3.0 * (3.0 * x).cos() * (2.0 * y).cos());
        let want_y = ScalarField::from_fn(g, |x, y| -2.0 * (3.0 * x).sin() * (2.0 * y).sin());
        assert!(max_diff(&f.x, &want_x) < 1e-12);
        assert!(max_diff(&f.y, &want_y) < 1e-12);
    }

    #[test]
    fn laplacian_examples() {
        let g = grid(32);
        assert!(laplacian(&ScalarField::constant(g, 2.0)).max_abs() < 1e-14);
        let s = ScalarField::from_fn(g, |x, _| x.sin());
        assert!(max_diff(&laplacian(&s), &s.scaled(-1.0)) < 1e-13);
        let tg = ScalarField::from_fn(g, |x, y| x.cos() * y.cos());
        assert!(max_diff(&laplacian(&tg), &tg.scaled(-2.0)) < 1e-13);
    }

    #[test]
    fn mollify_examples() {
        let g = grid(64);
        let c = mollify(&ScalarField::constant(g, 1.5), 0.3).unwrap();
        assert!(max_diff(&c, &ScalarField::constant(g, 1.5)) < 1e-14);

        let ell = 0.4;
        let s = ScalarField::from_fn(g, |x, _| x.sin());
        let want = s.scaled((-ell * ell / 2.0f64).exp());
        assert!(max_diff(&mollify(&s, ell).unwrap(), &want) < 1e-14);

        assert!(mollify(&s, 0.0).is_err());
        assert!(mollify(&s, -1.0).is_err());
    }

    #[test]
    fn mollify_converges_monotonically_and_does_not_expand() {
        let g = grid(64);
        let f = random_band_limited(g, 12, 3);
        let mut last = f64::INFINITY;
        for ell in [0.5, 0.25, 0.125] {
            let m = mollify(&f, ell).unwrap();
            let err = (m.sub(&f).values().iter().map(|v| v * v).sum::<f64>() * g.cell_area()).sqrt();
            assert!(err < last);
            assert!(m.max_abs() <= f.max_abs() + 1e-12);
            assert!((m.mean() - f.mean()).abs() < 1e-14);
            last = err;
        }
    }

    #[test]
    fn dealias_examples() {
        let g = grid(64);
        let f = random_band_limited(g, 20, 4);
        assert!(max_diff(&dealias(&f), &f) < 1e-12);
        let high = ScalarField::from_fn(g, |x, _| (31.0 * x).cos());
        assert!(dealias(&high).max_abs() < 1e-13);
        let rough = ScalarField::from_fn(g, |x, y| (x * y).sin().signum());
        let once = dealias(&rough);
        assert!(max_diff(&dealias(&once), &once) < 1e-12);
    }

    #[test]
    fn resample_preserves_band_limited_fields() {
        let f = random_band_limited(grid(32), 10, 5);
        let up = resample(&f, grid(64));
        let want = random_band_limited(grid(64), 10, 5);
        assert!(max_diff(&up, &want) < 1e-12);
        assert!(max_diff(&resample(&up, grid(32)), &f) < 1e-12);
    }

    #[test]
    fn interpolant_reproduces_off_grid_values() {
        let g = grid(32);
        let f = random_band_limited(g, 8, 6);
        let interp = SpectralInterpolant::new(&f);
        let fine = random_band_limited(grid(128), 8, 6);
        for (i, j) in [(3, 5), (17, 101), (64, 64), (127, 0)] {
            let p = [grid(128).coord(i), grid(128).coord(j)];
            assert!((interp.eval(p) - fine.at(i, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn transpose_is_involution() {
        let n = 64;
        let mut v: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let orig = v.clone();
        transpose_in_place(&mut v, n);
        assert_eq!(v[1].re, n as f64);
        transpose_in_place(&mut v, n);
        assert_eq!(v, orig);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = grid(128);
        let f = random_band_limited(g, 40, 9);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = pool.install(|| ops(g).forward(&f));
        let b = serial.install(|| ops(g).forward(&f));
        assert_eq!(a, b);
    }
}
