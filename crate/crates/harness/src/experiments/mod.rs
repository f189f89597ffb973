//! The seven experiments. Each one turns an [`ExperimentSpec`] into an
//! [`ExperimentReport`]; failing properties become failed checks, while a
//! failed resolution guard aborts the experiment with its report.

pub mod e1_convergence;
pub mod e2_distributions;
pub mod e3_anomaly;
pub mod e4_regularity;
pub mod e5_continuity;
pub mod e6_functionals;
pub mod e7_lagrangian;

use yudovich::dynamics::Trajectory;
use yudovich::ScalarField;

use crate::constants::Constants;
use crate::error::Result;
use crate::report::{nu_label, ExperimentReport, RunSummary};
use crate::spec::{ExperimentId, ExperimentSpec};
use crate::sweep::{run_ladder, Stepping};

pub fn run_experiment(spec: &ExperimentSpec, constants: &Constants) -> Result<ExperimentReport> {
    match spec.id {
        ExperimentId::E1 => e1_convergence::run(spec),
        ExperimentId::E2 => e2_distributions::run(spec),
        ExperimentId::E3 => e3_anomaly::run(spec),
        ExperimentId::E4 => e4_regularity::run(spec),
        ExperimentId::E5 => e5_continuity::run(spec),
        ExperimentId::E6 => e6_functionals::run(spec, constants),
        ExperimentId::E7 => e7_lagrangian::run(spec),
    }
}

/// An inviscid reference run and the viscous ladder on the same datum.
pub(crate) struct LadderRuns {
    pub nus: Vec<f64>,
    pub reference: Trajectory,
    pub viscous: Vec<Trajectory>,
}

impl LadderRuns {
    pub fn run(omega0: &ScalarField, nus: &[f64], stepping: Stepping) -> Result<Self> {
        let mut all = Vec::with_capacity(nus.len() + 1);
        all.push(0.0);
        all.extend_from_slice(nus);
        let mut runs = run_ladder(omega0, &all, stepping)?;
        let reference = runs.remove(0);
        Ok(Self {
            nus: nus.to_vec(),
            reference,
            viscous: runs,
        })
    }

    pub fn summaries(&self) -> Vec<RunSummary> {
        std::iter::once(RunSummary::of(nu_label(0.0), &self.reference))
            .chain(self.nus.iter().zip(&self.viscous).map(|(&nu, t)| RunSummary::of(nu_label(nu), t)))
            .collect()
    }
}

/// Evaluation points from a low-discrepancy sequence on the torus.
pub fn eval_points(count: usize) -> Vec<[f64; 2]> {
    use yudovich::grid::TWO_PI;
    (0..count)
        .map(|i| {
            let i = i as f64 + 0.5;
            [
                TWO_PI * (i * 0.754_877_666_246_692_7).fract(),
                TWO_PI * (i * 0.569_840_290_998_053_3).fract(),
            ]
        })
        .collect()
}
