use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::field::ScalarField;
use crate::spectral::{self, ops};

/// `‖f‖_p` by the rectangle rule; `p = ∞` gives `max|f|`.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid("p", format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    let m = f.max_abs();
    if p.is_infinite() {
        return Ok(m);
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    // scaling by the maximum keeps |f/m|^p in range for large p
    let s: f64 = f.values().iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(m * (s * f.grid().cell_area()).powf(1.0 / p))
}

/// `‖f − g‖_p`.
pub fn lp_distance(f: &ScalarField, g: &ScalarField, p: f64) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch {
            expected: f.grid().n(),
            found: g.grid().n(),
        });
    }
    lp_norm(&f.sub(g), p)
}

/// Kinetic energy `½‖u‖₂²` of the Biot–Savart velocity; the mean mode is ignored.
pub fn energy(omega: &ScalarField) -> f64 {
    let o = ops(omega.grid());
    let s = o.forward(omega);
    let g = omega.grid();
    let n = g.n();
    let mut acc = 0.0;
    for m1 in 0..n {
        let k1 = g.wavenumber(m1) as f64;
        for m2 in 0..n {
            let k2 = g.wavenumber(m2) as f64;
            let kk = k1 * k1 + k2 * k2;
            if kk > 0.0 {
                acc += s.coeffs()[m1 * n + m2].norm_sqr() / kk;
            }
        }
    }
    0.5 * g.area() * acc
}

/// `½‖ω‖₂²`.
pub fn enstrophy(omega: &ScalarField) -> f64 {
    0.5 * casimir(omega, |y| y * y)
}

/// `½‖∇ω‖₂²`.
pub fn palinstrophy(omega: &ScalarField) -> f64 {
    let g = spectral::gradient(omega);
    0.5 * g.l2_norm().powi(2)
}

/// `∫ f(ω) dx`.
pub fn casimir(omega: &ScalarField, f: impl Fn(f64) -> f64) -> f64 {
    omega.values().iter().map(|&v| f(v)).sum::<f64>() * omega.grid().cell_area()
}

/// `∫ f″(ω)|∇ω|² dx` for one snapshot.
pub fn weighted_gradient_integral(omega: &ScalarField, f_second: impl Fn(f64) -> f64) -> f64 {
    let g = spectral::gradient(omega);
    let s: f64 = omega
        .values()
        .iter()
        .zip(g.x.values().iter().zip(g.y.values()))
        .map(|(&w, (&a, &b))| f_second(w) * (a * a + b * b))
        .sum();
    s * omega.grid().cell_area()
}

/// `ν ∫₀ᵀ ∫ f″(ω)|∇ω|² dx dt` by the trapezoid rule over the stored snapshots.
pub fn dissipation_integral(traj: &Trajectory, f_second: impl Fn(f64) -> f64) -> Result<f64> {
    let nu = traj.nu();
    if nu == 0.0 {
        return Err(Error::Inviscid);
    }
    let rates: Vec<f64> = traj
        .snapshots()
        .iter()
        .map(|w| weighted_gradient_integral(w, &f_second))
        .collect();
    Ok(nu * trapezoid(traj.times(), &rates))
}

/// Trapezoid rule on a nonuniform grid.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn grid(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        let g = grid(64);
        assert!((lp_norm(&ScalarField::constant(g, 1.0), 2.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        let s = ScalarField::from_fn(g, |x, _| x.sin());
        assert!((lp_norm(&s, f64::INFINITY).unwrap() - 1.0).abs() < 1.0 / (64.0 * 64.0));
        let expected = (4.0 * PI * PI * 3.0 / 8.0).powf(0.25);
        assert!((lp_norm(&s, 4.0).unwrap() - expected).abs() < 1e-12);
        assert!(lp_norm(&s, 0.5).is_err());
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let g = grid(32);
        let f = ScalarField::from_fn(g, |x, _| 1e3 * x.sin());
        let v = lp_norm(&f, 200.0).unwrap();
        assert!(v.is_finite() && v < 1e3 * (4.0 * PI * PI).powf(1.0 / 200.0) + 1e-9);
    }

    #[test]
    fn energy_of_single_mode() {
        // u = (0, −cos x₁): ½∫cos² = π²
        let g = grid(32);
        let w = ScalarField::from_fn(g, |x, _| x.sin());
        assert!((energy(&w) - PI * PI).abs() < 1e-12);
        assert!((enstrophy(&w) - PI * PI).abs() < 1e-12);
        assert!((palinstrophy(&w) - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_for_lines() {
        let t = [0.0, 0.5, 2.0];
        let y = [1.0, 2.0, 5.0];
        assert!((trapezoid(&t, &y) - 6.0).abs() < 1e-15);
    }
}
