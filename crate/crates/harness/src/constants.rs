//! Frozen empirical constants. The integrability exponent, the
//! Calderon-Zygmund surrogate and the regression maxima are calibrated once
//! on the functional corpus (`yudovich diagnose --calibrate`) and asserted
//! thereafter.

use std::path::Path;

use ini::Ini;

use crate::error::{config_error, Result};

/// Exponents at which Calderon-Zygmund ratios are tracked.
pub const CZ_EXPONENTS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];

const BUILTIN: &str = include_str!("../data/constants.ini");

#[derive(Debug, Clone, PartialEq)]
pub struct Constants {
    /// Integrability exponent `γ̂ = 1/(2e Ĉ_CZ)`.
    pub gamma_hat: f64,
    /// Largest corpus value of `‖∇u‖_p / (p‖ω‖_p)` over [`CZ_EXPONENTS`].
    pub c_cz: f64,
    /// Bound on `∫exp(γ̂|∇u|/Ω_∞)`.
    pub c_k: f64,
    /// Regression maxima over corpus and ladder snapshots.
    pub exp_max: f64,
    pub cz_max: [f64; 4],
    pub loglip_max: f64,
}

impl Constants {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in constants file is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text)?;
        let get = |section: &str, key: &str| -> Result<f64> {
            let v = ini
                .get_from(Some(section), key)
                .ok_or_else(|| config_error(section, key, "missing"))?;
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| config_error(section, key, format!("cannot parse `{v}`")))?;
            if x.is_finite() && x > 0.0 {
                Ok(x)
            } else {
                Err(config_error(section, key, "must be positive and finite"))
            }
        };
        let mut cz_max = [0.0; 4];
        for (slot, p) in cz_max.iter_mut().zip(CZ_EXPONENTS) {
            *slot = get("regression", &format!("cz_max_p{p}"))?;
        }
        Ok(Self {
            gamma_hat: get("fitted", "gamma_hat")?,
            c_cz: get("fitted", "c_cz")?,
            c_k: get("fitted", "c_k")?,
            exp_max: get("regression", "exp_max")?,
            cz_max,
            loglip_max: get("regression", "loglip_max")?,
        })
    }

    pub fn to_ini(&self) -> String {
        let mut s = String::from("; written by `yudovich diagnose --calibrate`\n[fitted]\n");
        s.push_str(&format!("gamma_hat = {:e}\n", self.gamma_hat));
        s.push_str(&format!("c_cz = {:e}\n", self.c_cz));
        s.push_str(&format!("c_k = {:e}\n", self.c_k));
        s.push_str("\n[regression]\n");
        s.push_str(&format!("exp_max = {:e}\n", self.exp_max));
        for (v, p) in self.cz_max.iter().zip(CZ_EXPONENTS) {
            s.push_str(&format!("cz_max_p{p} = {v:e}\n"));
        }
        s.push_str(&format!("loglip_max = {:e}\n", self.loglip_max));
        s
    }
}

/// Rounds `x > 0` up to four significant digits, so a frozen maximum never
/// sits below the value it was taken from.
pub fn round_up(x: f64) -> f64 {
    if !(x > 0.0 && x.is_finite()) {
        return x;
    }
    let scale = 10f64.powi(3 - x.log10().floor() as i32);
    let r = (x * scale).ceil() / scale;
    if r < x {
        r + 1.0 / scale
    } else {
        r
    }
}
