//! Measurement functionals: norms and budgets, distribution functions,
//! Littlewood–Paley Besov seminorms and velocity-gradient functionals.

mod besov;
mod distribution;
mod functionals;
mod norms;
mod rows;

pub use besov::{
    besov_index, besov_seminorm, block_multiplier, h_minus_one_norm, max_block, smooth_step, BesovIndex,
    BesovSpectrum, PARTITION_VERSION,
};
pub use distribution::{distribution, wasserstein1, EmpiricalDistribution};
pub use functionals::{
    cz_ratio, exp_integral, log_lipschitz_modulus, velocity_gradient_norm, ExpIntegral, LogLipschitzBound,
    EXP_CLAMP,
};
pub use norms::{
    casimir, dissipation_integral, energy, enstrophy, lp_distance, lp_norm, palinstrophy, trapezoid,
    weighted_gradient_integral,
};
pub use rows::{write_rows, DiagnosticRow, ROW_HEADER};
