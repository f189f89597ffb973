use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::norms::lp_norm;
use crate::error::{invalid, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::{torus_distance, wrap, TWO_PI};
use crate::spectral::{self, SpectralInterpolant};

/// Exponents above this are clamped in [`exp_integral`].
pub const EXP_CLAMP: f64 = 700.0;

/// Frobenius norm of the 2×2 velocity gradient at every node.
pub fn velocity_gradient_norm(u: &VectorField) -> ScalarField {
    let a = spectral::gradient(&u.x);
    let b = spectral::gradient(&u.y);
    let g = u.grid();
    let values = (0..g.len())
        .map(|i| {
            let (p, q) = (a.x.values()[i], a.y.values()[i]);
            let (r, s) = (b.x.values()[i], b.y.values()[i]);
            (p * p + q * q + r * r + s * s).sqrt()
        })
        .collect();
    ScalarField::new(g, values).expect("grid-sized buffer")
}

/// `∫ exp(β|∇u|) dx` together with the number of clamped nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpIntegral {
    pub value: f64,
    /// Nodes where `β|∇u|` exceeded [`EXP_CLAMP`]; nonzero means β is too large.
    pub saturated: usize,
}

impl ExpIntegral {
    pub fn is_saturated(&self) -> bool {
        self.saturated > 0
    }
}

pub fn exp_integral(u: &VectorField, beta: f64) -> ExpIntegral {
    let grad = velocity_gradient_norm(u);
    let mut saturated = 0;
    let s: f64 = grad
        .values()
        .iter()
        .map(|&v| {
            let e = beta * v;
            if e > EXP_CLAMP {
                saturated += 1;
                EXP_CLAMP.exp()
            } else {
                e.exp()
            }
        })
        .sum();
    ExpIntegral {
        value: s * grad.grid().cell_area(),
        saturated,
    }
}

/// `‖∇u‖_p / (p‖ω‖_p)` with `u` the Biot–Savart velocity of `ω`.
pub fn cz_ratio(omega: &ScalarField, p: f64) -> Result<f64> {
    let u = spectral::biot_savart(omega)?;
    let num = lp_norm(&velocity_gradient_norm(&u), p)?;
    let den = lp_norm(omega, p)?;
    Ok(if den == 0.0 { 0.0 } else { num / (p * den) })
}

/// Parameters of the log-Lipschitz bound `|u(x) − u(y)| ≤ (C/β) d ln(C·C_K/d²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLipschitzBound {
    pub beta: f64,
    pub c_k: f64,
}

impl LogLipschitzBound {
    fn rhs(&self, c: f64, d: f64) -> f64 {
        c / self.beta * d * (c * self.c_k / (d * d)).ln()
    }

    /// Smallest `C` with `rhs(C, d) ≥ du`.
    fn smallest_constant(&self, d: f64, du: f64) -> f64 {
        if du <= 0.0 {
            return 0.0;
        }
        // rhs is increasing in C once the logarithm is positive
        let mut lo = d * d / self.c_k;
        let mut hi = lo.max(1e-300) * 2.0;
        while self.rhs(hi, d) < du {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.rhs(mid, d) < du {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi {
                break;
            }
        }
        hi
    }
}

/// Minimal constant making the log-Lipschitz bound hold on `pair_count`
/// random pairs. Separations are log-uniform in `[10⁻³, π]`; velocities are
/// evaluated with the exact trigonometric interpolant.
pub fn log_lipschitz_modulus(
    u: &VectorField,
    bound: LogLipschitzBound,
    pair_count: usize,
    seed: u64,
) -> Result<f64> {
    if pair_count < 1000 {
        return Err(invalid("pair_count", format!("need at least 1000 pairs, got {pair_count}")));
    }
    if !(bound.beta > 0.0 && bound.c_k > 0.0) {
        return Err(invalid("bound", "beta and C_K must be positive"));
    }
    let ix = SpectralInterpolant::new(&u.x);
    let iy = SpectralInterpolant::new(&u.y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dmin, dmax) = (1e-3f64, std::f64::consts::PI);
    let mut worst: f64 = 0.0;
    for _ in 0..pair_count {
        let x = [rng.random::<f64>() * TWO_PI, rng.random::<f64>() * TWO_PI];
        let r = (dmin.ln() + rng.random::<f64>() * (dmax / dmin).ln()).exp();
        let th = rng.random::<f64>() * TWO_PI;
        let y = [wrap(x[0] + r * th.cos()), wrap(x[1] + r * th.sin())];
        let d = torus_distance(x, y);
        let du = (ix.eval(x) - ix.eval(y)).hypot(iy.eval(x) - iy.eval(y));
        worst = worst.max(bound.smallest_constant(d, du));
    }
    Ok(worst)
}
