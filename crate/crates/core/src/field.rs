//! Grid-sampled scalar and vector fields, plus the binary snapshot format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Real periodic field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch(values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x₁, x₂)` at every node.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid.points().map(|[x, y]| f(x, y)).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Subtracts the mean so the field can be fed to Biot–Savart.
    pub fn project_mean(mut self) -> Self {
        let m = self.mean();
        self.values.iter_mut().for_each(|v| *v -= m);
        self
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    /// Rectangle-rule integral over the torus.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    /// Writes the field in the `YUD1` snapshot format.
    pub fn write_snapshot(&self, path: &Path, time: f64) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_snapshot_to(&mut w, time)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_snapshot_to<W: Write>(&self, w: &mut W, time: f64) -> Result<()> {
        writeln!(w, "YUD1 {} {} {}", self.grid.n(), self.grid.length(), time)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a `YUD1` snapshot, returning the field and its time stamp.
    pub fn read_snapshot(path: &Path) -> Result<(Self, f64)> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_snapshot_from(&mut r).map_err(|e| match e {
            Error::Snapshot { reason, .. } => Error::Snapshot {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })
    }

    pub fn read_snapshot_from<R: BufRead>(r: &mut R) -> Result<(Self, f64)> {
        let bad = |reason: String| Error::Snapshot {
            path: Default::default(),
            reason,
        };
        let mut header = String::new();
        r.read_line(&mut header)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "YUD1" {
            return Err(bad(format!("bad header {:?}", header.trim_end())));
        }
        let n: usize = parts[1].parse().map_err(|_| bad("bad n".into()))?;
        let length: f64 = parts[2].parse().map_err(|_| bad("bad length".into()))?;
        let time: f64 = parts[3].parse().map_err(|_| bad("bad time".into()))?;
        let grid = GridSpec::new(n)?;
        if (length - grid.length()).abs() > 1e-12 {
            return Err(bad(format!("unsupported torus length {length}")));
        }
        let mut bytes = vec![0u8; 8 * grid.len()];
        r.read_exact(&mut bytes)
            .map_err(|_| bad("truncated payload".into()))?;
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok((Self { grid, values }, time))
    }
}

/// Two-component periodic field (velocity, gradients).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        if x.grid() != y.grid() {
            return Err(Error::GridMismatch {
                expected: x.grid().n(),
                found: y.grid().n(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            x: ScalarField::zeros(grid),
            y: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        Self {
            x: ScalarField::from_fn(grid, |a, b| f(a, b)[0]),
            y: ScalarField::from_fn(grid, |a, b| f(a, b)[1]),
        }
    }

    #[inline]
    pub fn grid(&self) -> GridSpec {
        self.x.grid()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.x.zip_map(&self.y, f64::hypot)
    }

    /// Largest pointwise speed.
    pub fn max_norm(&self) -> f64 {
        self.x
            .values()
            .iter()
            .zip(self.y.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x: self.x.scaled(c),
            y: self.y.scaled(c),
        }
    }

    /// Linear combination `(1 - w)·self + w·other`.
    pub fn lerp(&self, other: &Self, w: f64) -> Self {
        Self {
            x: self.x.zip_map(&other.x, |a, b| a + w * (b - a)),
            y: self.y.zip_map(&other.y, |a, b| a + w * (b - a)),
        }
    }

    /// `‖u‖₂` over the torus.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self
            .x
            .values()
            .iter()
            .zip(self.y.values())
            .map(|(a, b)| a * a + b * b)
            .sum();
        (s * self.grid().cell_area()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn snapshot_header_is_ascii_and_payload_little_endian() {
        let g = GridSpec::new(16).unwrap();
        let f = ScalarField::from_fn(g, |x, y| x.sin() * y.cos());
        let mut buf = Vec::new();
        f.write_snapshot_to(&mut buf, 0.25).unwrap();
        let header_end = buf.iter().position(|&b| b == b'\n').unwrap();
        let header = std::str::from_utf8(&buf[..header_end]).unwrap();
        assert_eq!(header, format!("YUD1 16 {} 0.25", std::f64::consts::TAU));
        assert_eq!(buf.len(), header_end + 1 + 8 * 256);
        let first = f64::from_le_bytes(buf[header_end + 1..header_end + 9].try_into().unwrap());
        assert_eq!(first, f.values()[0]);

        let (back, t) = ScalarField::read_snapshot_from(&mut Cursor::new(buf)).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(back, f);
    }

    #[test]
    fn truncated_snapshot_is_rejected() {
        let g = GridSpec::new(16).unwrap();
        let mut buf = Vec::new();
        ScalarField::zeros(g).write_snapshot_to(&mut buf, 0.0).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(
            ScalarField::read_snapshot_from(&mut Cursor::new(buf)),
            Err(Error::Snapshot { .. })
        ));
    }

    #[test]
    fn projection_removes_mean() {
        let g = GridSpec::new(32).unwrap();
        let f = ScalarField::from_fn(g, |x, _| 3.0 + x.cos()).project_mean();
        assert!(f.mean().abs() < 1e-14);
    }
}
