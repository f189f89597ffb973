use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use yudovich::fields::{self, PatchSpec};
use yudovich::grid::GridSpec;
use yudovich::spectral;
use yudovich::ScalarField;

use crate::error::{HarnessError, Result};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [Self::E1, Self::E2, Self::E3, Self::E4, Self::E5, Self::E6, Self::E7];

    pub fn label(self) -> &'static str {
        match self {
            Self::E1 => "E1",
            Self::E2 => "E2",
            Self::E3 => "E3",
            Self::E4 => "E4",
            Self::E5 => "E5",
            Self::E6 => "E6",
            Self::E7 => "E7",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Self::E1 => "vanishing-viscosity convergence in L^p",
            Self::E2 => "convergence of vorticity distributions",
            Self::E3 => "vanishing of the dissipation integrals",
            Self::E4 => "propagation of Besov regularity",
            Self::E5 => "continuity of the solution map",
            Self::E6 => "exponential integrability and Calderon-Zygmund ratios",
            Self::E7 => "stochastic Lagrangian representation",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ExperimentId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::UnknownExperiment(s.to_string()))
    }
}

/// Named initial-data factory.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Eigenmode { mode: u32 },
    TaylorGreen,
    RandomBesov { s: f64 },
    RandomBand { s: f64, kmax: i64 },
    Disk { radius: f64, mollify: Option<f64> },
    Koch { iterations: u32, mollify: Option<f64> },
}

impl InitialData {
    pub fn build(&self, grid: GridSpec, seed: u64) -> Result<ScalarField> {
        Ok(match *self {
            Self::Eigenmode { mode } => fields::eigenmode(mode, grid)?,
            Self::TaylorGreen => fields::taylor_green(grid),
            Self::RandomBesov { s } => fields::random_besov(s, seed, grid)?,
            Self::RandomBand { s, kmax } => fields::random_besov_band(s, seed, grid, kmax)?,
            Self::Disk { radius, mollify } => fields::vortex_patch(
                &PatchSpec {
                    mollify,
                    ..PatchSpec::disk(radius)
                },
                grid,
            )?,
            Self::Koch { iterations, mollify } => fields::vortex_patch(
                &PatchSpec {
                    mollify,
                    ..PatchSpec::koch(iterations)
                },
                grid,
            )?,
        })
    }

    /// Nominal Besov regularity of the datum, where the factory prescribes one.
    pub fn nominal_s(&self) -> Option<f64> {
        match *self {
            Self::RandomBesov { s } | Self::RandomBand { s, .. } => Some(s),
            _ => None,
        }
    }

    /// Same family with another regularity index; other data are unchanged.
    pub fn with_s(&self, s: f64) -> Self {
        match *self {
            Self::RandomBesov { .. } => Self::RandomBesov { s },
            Self::RandomBand { kmax, .. } => Self::RandomBand { s, kmax },
            ref other => other.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Eigenmode { mode } => format!("eigenmode(N={mode})"),
            Self::TaylorGreen => "taylor_green".into(),
            Self::RandomBesov { s } => format!("random_besov(s={s})"),
            Self::RandomBand { s, kmax } => format!("random_band(s={s}, kmax={kmax})"),
            Self::Disk { radius, mollify } => format!("disk(r={radius}, mollify={mollify:?})"),
            Self::Koch { iterations, mollify } => format!("koch(i={iterations}, mollify={mollify:?})"),
        }
    }
}

/// Strictly decreasing list of positive viscosities.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscosityLadder(Vec<f64>);

impl ViscosityLadder {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(HarnessError::Ladder("empty ladder".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(HarnessError::Ladder(format!("viscosities must be positive: {values:?}")));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HarnessError::Ladder(format!("viscosities must decrease strictly: {values:?}")));
        }
        Ok(Self(values))
    }

    /// `count` values from `start` down, `per_decade` per factor of ten.
    pub fn geometric(start: f64, per_decade: usize, count: usize) -> Result<Self> {
        let r = 10f64.powf(-1.0 / per_decade.max(1) as f64);
        Self::new((0..count).map(|i| start * r.powi(i as i32)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn smallest(&self) -> f64 {
        *self.0.last().expect("ladder is nonempty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for ViscosityLadder {
    fn default() -> Self {
        Self(vec![1e-2, 5e-3, 2e-3, 1e-3, 5e-4])
    }
}

/// Everything one experiment needs. Fields that only some experiments read
/// are grouped at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub data: InitialData,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored snapshots.
    pub stride: usize,
    pub ladder: ViscosityLadder,
    pub p_list: Vec<f64>,
    /// Experiment seed, already split from the top-level seed.
    pub seed: u64,
    pub out: PathBuf,
    /// Re-run the smallest viscosity at `2n` and require a ≤10% change.
    pub guard: bool,

    /// E1: report convergence only, without a rate assertion (rough data).
    pub convergence_only: bool,
    /// E4: regularity indices of the initial data.
    pub s_list: Vec<f64>,
    /// E5: perturbation sizes and horizons.
    pub deltas: Vec<f64>,
    pub horizons: Vec<f64>,
    /// E6: corpus size and log-Lipschitz pair count.
    pub corpus_size: usize,
    pub pair_count: usize,
    /// E7: viscosity, Monte-Carlo sizes and particle step.
    pub nu: f64,
    pub realizations: usize,
    pub fdr_realizations: usize,
    pub flow_dt: f64,
    pub eval_points: usize,
    pub subgrid: usize,
}

impl ExperimentSpec {
    /// Desk-scale defaults; `top_seed` is split by the experiment label.
    pub fn default_for(id: ExperimentId, top_seed: u64) -> Self {
        let mut spec = Self {
            id,
            data: InitialData::RandomBesov { s: 0.5 },
            n: 256,
            dt: 5e-3,
            t_end: 1.0,
            stride: 10,
            ladder: ViscosityLadder::default(),
            p_list: vec![1.0, 2.0, 4.0],
            seed: derive_seed(top_seed, id.label()),
            out: PathBuf::from("results").join(id.label()),
            guard: true,
            convergence_only: false,
            s_list: vec![0.3, 0.5],
            deltas: vec![1e-1, 1e-2, 1e-3, 1e-4],
            horizons: vec![0.5, 1.0, 2.0],
            corpus_size: 20,
            pair_count: 2000,
            nu: 1e-2,
            realizations: 10_000,
            fdr_realizations: 1000,
            flow_dt: 1e-2,
            eval_points: 64,
            subgrid: 32,
        };
        match id {
            ExperimentId::E1 => {}
            ExperimentId::E2 => {
                spec.data = InitialData::RandomBand { s: 1.0, kmax: 8 };
                spec.dt = 1e-2;
                spec.t_end = 3.0;
                spec.stride = 25;
            }
            ExperimentId::E3 => spec.stride = 1,
            ExperimentId::E4 => {
                spec.dt = 1e-2;
                spec.t_end = 2.0;
            }
            ExperimentId::E5 => {
                spec.n = 128;
                spec.dt = 1e-2;
                spec.t_end = 2.0;
                spec.stride = 5;
            }
            ExperimentId::E6 => {
                spec.n = 128;
                spec.dt = 1e-2;
            }
            ExperimentId::E7 => {
                spec.data = InitialData::RandomBand { s: 1.0, kmax: 8 };
                spec.dt = 1e-2;
                spec.stride = 1;
            }
        }
        spec
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.n)?)
    }

    /// Initial vorticity of the experiment on its own grid.
    pub fn initial_data(&self) -> Result<ScalarField> {
        self.data.build(self.grid()?, derive_seed(self.seed, "data"))
    }

    /// The same datum carried to another grid by spectral zero padding.
    pub fn initial_data_on(&self, grid: GridSpec) -> Result<ScalarField> {
        Ok(spectral::resample(&self.initial_data()?, grid))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.label().parse::<ExperimentId>().unwrap(), id);
        }
        assert_eq!("e3".parse::<ExperimentId>().unwrap(), ExperimentId::E3);
        assert!("E8".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn ladders_must_decrease() {
        assert!(ViscosityLadder::new(vec![1e-2, 1e-2]).is_err());
        assert!(ViscosityLadder::new(vec![1e-3, 1e-2]).is_err());
        assert!(ViscosityLadder::new(vec![1e-2, 0.0]).is_err());
        assert!(ViscosityLadder::new(vec![]).is_err());
        let g = ViscosityLadder::geometric(1e-2, 5, 6).unwrap();
        assert!((g.smallest() - 1e-3).abs() < 1e-15);
        assert_eq!(ViscosityLadder::default().len(), 5);
    }

    #[test]
    fn experiment_seeds_differ() {
        let a = ExperimentSpec::default_for(ExperimentId::E1, 7);
        let b = ExperimentSpec::default_for(ExperimentId::E2, 7);
        assert_ne!(a.seed, b.seed);
        assert_eq!(a.seed, ExperimentSpec::default_for(ExperimentId::E1, 7).seed);
    }

    #[test]
    fn data_factory_is_deterministic() {
        let mut spec = ExperimentSpec::default_for(ExperimentId::E1, 1);
        spec.n = 32;
        assert_eq!(spec.initial_data().unwrap(), spec.initial_data().unwrap());
        let fine = spec.initial_data_on(GridSpec::new(64).unwrap()).unwrap();
        assert!((fine.max_abs() - spec.initial_data().unwrap().max_abs()).abs() < 0.05);
        spec.data = InitialData::Koch {
            iterations: 2,
            mollify: None,
        };
        assert!(spec.initial_data().unwrap().mean().abs() < 1e-12);
    }
}
