//! Periodic bicubic (4×4 Lagrange) interpolation of grid fields.

use crate::grid::GridSpec;

/// Precomputed 4×4 stencil for one off-grid point; reusable across fields
/// sampled on the same grid.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    rows: [usize; 4],
    cols: [usize; 4],
    wx: [f64; 4],
    wy: [f64; 4],
}

#[inline]
fn cubic_weights(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

impl Stencil {
    pub fn new(grid: GridSpec, p: [f64; 2]) -> Self {
        let n = grid.n();
        let inv_dx = 1.0 / grid.dx();
        let locate = |x: f64| -> ([usize; 4], [f64; 4]) {
            let s = x * inv_dx;
            let base = s.floor();
            let t = s - base;
            let b = (base as i64).rem_euclid(n as i64) as usize;
            let idx = [(b + n - 1) % n, b, (b + 1) % n, (b + 2) % n];
            (idx, cubic_weights(t))
        };
        let (rows, wx) = locate(p[0]);
        let (cols, wy) = locate(p[1]);
        Self { rows, cols, wx, wy }
    }

    #[inline]
    pub fn apply(&self, values: &[f64], n: usize) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            let row = &values[self.rows[a] * n..];
            let mut r = 0.0;
            for b in 0..4 {
                r += self.wy[b] * row[self.cols[b]];
            }
            acc += self.wx[a] * r;
        }
        acc
    }
}

/// Interpolates `values` (sampled on `grid`) at `p`.
pub fn bicubic(grid: GridSpec, values: &[f64], p: [f64; 2]) -> f64 {
    Stencil::new(grid, p).apply(values, grid.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;

    #[test]
    fn reproduces_nodes_and_cubics() {
        let g = GridSpec::new(32).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x + 2.0 * y).sin());
        assert!((bicubic(g, f.values(), [g.coord(5), g.coord(9)]) - f.at(5, 9)).abs() < 1e-14);
        let w = cubic_weights(0.3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // exact for cubic polynomials in the fractional offset
        let pts = [-1.0f64, 0.0, 1.0, 2.0];
        let poly = |t: f64| 2.0 * t * t * t - t * t + 0.5;
        let approx: f64 = pts.iter().zip(w).map(|(&q, wq)| wq * poly(q)).sum();
        assert!((approx - poly(0.3)).abs() < 1e-13);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let g = GridSpec::new(n).unwrap();
            let f = ScalarField::from_fn(g, |x, y| (x + y.cos()).sin());
            let mut worst: f64 = 0.0;
            for k in 0..50 {
                let p = [0.123 * k as f64, 6.2 - 0.117 * k as f64];
                let exact = (p[0] + p[1].cos()).sin();
                worst = worst.max((bicubic(g, f.values(), p) - exact).abs());
            }
            worst
        };
        let ratio = err(32) / err(64);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn wraps_negative_and_large_coordinates() {
        let g = GridSpec::new(32).unwrap();
        let f = ScalarField::from_fn(g, |x, y| x.sin() * y.cos());
        let p = [0.3, 1.1];
        let a = bicubic(g, f.values(), p);
        let b = bicubic(g, f.values(), [p[0] - std::f64::consts::TAU, p[1] + 2.0 * std::f64::consts::TAU]);
        assert!((a - b).abs() < 1e-12);
    }
}
