use crate::error::{HarnessError, Result};

/// Fewest ladder points a rate fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

/// Least-squares line through `(x, y)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `y − (slope·x + intercept)` per input point.
    pub residuals: Vec<f64>,
}

impl RateFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least squares on at least two points with distinct abscissae.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    let got = xs.len().min(ys.len());
    if xs.len() != ys.len() || got < 2 || xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(HarnessError::TooFewPoints { min: 2, got });
    }
    let n = got as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::TooFewPoints { min: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - (slope * x + intercept)).collect();
    let sse: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        residuals,
    })
}

/// Log–log rate fit along a viscosity ladder: `xs = ln ν`, `ys = ln error`.
///
/// Requires [`MIN_FIT_POINTS`] points so a slope is never read off two or
/// three runs.
pub fn rate_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    let got = xs.len().min(ys.len());
    if got < MIN_FIT_POINTS || xs.len() != ys.len() {
        return Err(HarnessError::TooFewPoints {
            min: MIN_FIT_POINTS,
            got,
        });
    }
    least_squares(xs, ys)
}

/// [`rate_fit`] on raw values, taking logarithms of both coordinates.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<RateFit> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    rate_fit(&lx, &ly)
}
