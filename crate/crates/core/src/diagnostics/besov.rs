use rustfft::num_complex::Complex64;

use super::norms::lp_norm;
use crate::error::{invalid, Result};
use crate::field::ScalarField;
use crate::spectral::{ops, Spectrum};

/// Identifies the dyadic partition; Besov constants are only comparable
/// between results computed with the same version.
pub const PARTITION_VERSION: &str = "sqrt-exp-step-v1";

/// Smooth step: 1 on `[0, 1]`, 0 on `[2, ∞)`, `C^∞` in between.
pub fn smooth_step(r: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = h(2.0 - r);
        a / (a + h(r - 1.0))
    }
}

/// Multiplier of block `j ≥ −1` at radius `|k|`.
///
/// The squares of the multipliers sum to one, so block energies add up to
/// the total energy; block `j ≥ 0` lives on `2^j < |k| < 2^{j+2}`.
pub fn block_multiplier(j: i32, k: f64) -> f64 {
    let sq = if j < 0 {
        smooth_step(k)
    } else {
        let s = (j as f64).exp2();
        smooth_step(k / (2.0 * s)) - smooth_step(k / s)
    };
    sq.max(0.0).sqrt()
}

/// Highest block index needed to cover every mode of an `n`-grid.
pub fn max_block(n: usize) -> i32 {
    let kmax = (n as f64 / 2.0) * std::f64::consts::SQRT_2;
    // blocks −1..=J sum to one on |k| ≤ 2^{J+1}
    let mut j = 0;
    while ((j + 1) as f64).exp2() < kmax {
        j += 1;
    }
    j
}

/// Block norms and the Besov seminorm of one field.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovSpectrum {
    pub s: f64,
    pub p: f64,
    /// `(j, ‖Δ_j f‖_p)` for `j = −1, 0, …`.
    pub blocks: Vec<(i32, f64)>,
    /// `sup_j 2^{js}‖Δ_j f‖_p`.
    pub seminorm: f64,
}

impl BesovSpectrum {
    /// Seminorm for another regularity index, reusing the block norms.
    pub fn seminorm_at(&self, s: f64) -> f64 {
        self.blocks
            .iter()
            .map(|&(j, b)| (j as f64 * s).exp2() * b)
            .fold(0.0, f64::max)
    }

    /// `Σ_j ‖Δ_j f‖₂²`; equals `‖f‖₂²` when `p = 2`.
    pub fn block_energy(&self) -> f64 {
        self.blocks.iter().map(|&(_, b)| b * b).sum()
    }
}

fn block_spectrum(s: &Spectrum, j: i32) -> Spectrum {
    s.apply_radial(|k| block_multiplier(j, k))
}

/// Littlewood–Paley block norms and `sup_j 2^{js}‖Δ_j f‖_p`.
pub fn besov_seminorm(f: &ScalarField, s: f64, p: f64) -> Result<BesovSpectrum> {
    if !(s >= 0.0) {
        return Err(invalid("s", format!("regularity must be >= 0, got {s}")));
    }
    if !(p >= 1.0) {
        return Err(invalid("p", format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    let g = f.grid();
    let o = ops(g);
    let spec = o.forward(f);
    let mut blocks = Vec::new();
    for j in -1..=max_block(g.n()) {
        let b = block_spectrum(&spec, j);
        let norm = if p == 2.0 {
            (b.power() * g.area()).sqrt()
        } else {
            lp_norm(&o.inverse(&b), p)?
        };
        blocks.push((j, norm));
    }
    let mut out = BesovSpectrum {
        s,
        p,
        blocks,
        seminorm: 0.0,
    };
    out.seminorm = out.seminorm_at(s);
    Ok(out)
}

/// `‖f‖_{H⁻¹} = (4π² Σ_{k≠0} |f̂_k|²/|k|²)^{1/2}`.
pub fn h_minus_one_norm(f: &ScalarField) -> f64 {
    let g = f.grid();
    let spec = ops(g).forward(f);
    let weighted = spec.apply(|k1, k2| {
        let kk = (k1 * k1 + k2 * k2) as f64;
        Complex64::new(if kk > 0.0 { 1.0 / kk.sqrt() } else { 0.0 }, 0.0)
    });
    (weighted.power() * g.area()).sqrt()
}

/// Regularity index estimated from the decay of the L^p block norms.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovIndex {
    /// `−slope` of `log₂‖Δ_j f‖_p` against `j`.
    pub index: f64,
    pub r_squared: f64,
    pub blocks_used: Vec<i32>,
}

/// Fits `‖Δ_j f‖_p ∼ 2^{−js}` over the blocks `0 ≤ j` whose support lies
/// below the dealiasing cutoff.
pub fn besov_index(f: &ScalarField, p: f64) -> Result<BesovIndex> {
    let spec = besov_seminorm(f, 0.0, p)?;
    let cut = f.grid().dealias_cutoff() as f64;
    let pts: Vec<(f64, f64)> = spec
        .blocks
        .iter()
        .filter(|&&(j, b)| j >= 0 && ((j + 2) as f64).exp2() <= cut && b > 0.0)
        .map(|&(j, b)| (j as f64, b.log2()))
        .collect();
    if pts.len() < 2 {
        return Err(invalid("f", "too few resolved dyadic blocks to fit an index"));
    }
    let (slope, r2) = least_squares(&pts);
    Ok(BesovIndex {
        index: -slope,
        r_squared: r2,
        blocks_used: pts.iter().map(|p| p.0 as i32).collect(),
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn multipliers_form_a_partition_of_unity() {
        for i in 0..2000 {
            let k = i as f64 * 0.1;
            let total: f64 = (-1..=12).map(|j| block_multiplier(j, k).powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-14, "k = {k}: {total}");
        }
    }

    #[test]
    fn single_mode_with_radius_four() {
        let g = GridSpec::new(64).unwrap();
        // unit L² norm: ‖sin(4x₁)‖₂ = √2 π
        let f = ScalarField::from_fn(g, |x, _| (4.0 * x).sin() / (2.0f64.sqrt() * PI));
        let b = besov_seminorm(&f, 1.0, 2.0).unwrap();
        assert!(b.seminorm >= 2.0 - 1e-12 && b.seminorm <= 8.0 + 1e-12);
        // the chosen partition puts |k| = 4 entirely in block j = 1
        assert!((b.seminorm - 2.0).abs() < 1e-12);
        let zero = besov_seminorm(&ScalarField::zeros(g), 1.0, 2.0).unwrap();
        assert_eq!(zero.seminorm, 0.0);
    }

    #[test]
    fn block_energies_sum_to_total() {
        let g = GridSpec::new(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = ScalarField::new(g, vals).unwrap();
        let b = besov_seminorm(&f, 0.5, 2.0).unwrap();
        let total = lp_norm(&f, 2.0).unwrap().powi(2);
        assert!(((b.block_energy() - total) / total).abs() < 1e-10);
        assert_eq!(b.blocks.last().unwrap().0, max_block(64));
    }

    #[test]
    fn l4_blocks_agree_with_l2_for_a_single_shell() {
        let g = GridSpec::new(64).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (4.0 * x).sin());
        let b = besov_seminorm(&f, 0.0, 4.0).unwrap();
        let direct = lp_norm(&f, 4.0).unwrap();
        let j1 = b.blocks.iter().find(|(j, _)| *j == 1).unwrap().1;
        assert!((j1 - direct).abs() < 1e-12);
    }

    #[test]
    fn h_minus_one_of_a_mode() {
        let g = GridSpec::new(32).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (2.0 * x).sin());
        let expected = 2.0f64.sqrt() * PI / 2.0;
        assert!((h_minus_one_norm(&f) - expected).abs() < 1e-12);
    }
}
