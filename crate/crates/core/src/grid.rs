//! The periodic square grid on the torus of side 2π.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Uniform `n × n` grid on the torus `[0, 2π)²`.
///
/// Node `(i, j)` sits at `(x₁, x₂) = (i·dx, j·dx)` and is stored at flat index
/// `i·n + j`, so rows run along `x₁` and each row is contiguous in `x₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    n: usize,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n²`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn length(&self) -> f64 {
        TWO_PI
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        TWO_PI / self.n as f64
    }

    /// Area element of one node in the rectangle rule.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        let dx = self.dx();
        dx * dx
    }

    /// `|𝕋²| = 4π²`.
    #[inline]
    pub fn area(&self) -> f64 {
        TWO_PI * TWO_PI
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Signed integer wavenumber of FFT bin `m`, in `[-n/2, n/2)`.
    #[inline]
    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Largest retained wavenumber under the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        self.n as i64 / 3
    }

    /// Iterator over node coordinates in storage order.
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| [self.coord(i), self.coord(j)]))
    }
}

/// Wraps a coordinate into `[0, 2π)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Minimal-image displacement component on a circle of length 2π.
#[inline]
pub fn periodic_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    if d > PI {
        d - TWO_PI
    } else {
        d
    }
}

/// Geodesic distance on the torus of side 2π; never exceeds `π√2`.
#[inline]
pub fn torus_distance(x: [f64; 2], y: [f64; 2]) -> f64 {
    periodic_delta(x[0], y[0]).hypot(periodic_delta(x[1], y[1]))
}
