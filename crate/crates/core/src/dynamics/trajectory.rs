use std::fs;
use std::io::Write;
use std::path::Path;

use super::config::SimulationConfig;
use crate::archive::VelocityArchive;
use crate::diagnostics::{energy, enstrophy};
use crate::error::{invalid, Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::grid::GridSpec;
use crate::spectral;

const INDEX_FILE: &str = "index.csv";
const META_FILE: &str = "run.cfg";

/// Stored vorticity (or scalar) snapshots of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    config: SimulationConfig,
    forced: bool,
    steps: Vec<usize>,
    times: Vec<f64>,
    snapshots: Vec<ScalarField>,
    forcing_integral: f64,
}

impl Trajectory {
    pub(crate) fn start(config: SimulationConfig, initial: ScalarField) -> Self {
        Self {
            forced: config.forcing.is_some(),
            config,
            steps: vec![0],
            times: vec![0.0],
            snapshots: vec![initial],
            forcing_integral: 0.0,
        }
    }

    pub(crate) fn push(&mut self, step: usize, time: f64, field: ScalarField) {
        self.steps.push(step);
        self.times.push(time);
        self.snapshots.push(field);
    }

    pub(crate) fn set_forcing_integral(&mut self, v: f64) {
        self.forcing_integral = v;
    }

    /// Builds a trajectory from stored parts; times must increase strictly.
    pub fn from_parts(
        config: SimulationConfig,
        forced: bool,
        steps: Vec<usize>,
        times: Vec<f64>,
        snapshots: Vec<ScalarField>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != snapshots.len() || steps.len() != times.len() {
            return Err(Error::SizeMismatch(times.len(), snapshots.len()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "snapshot times must increase strictly"));
        }
        let grid = snapshots[0].grid();
        if let Some(bad) = snapshots.iter().find(|s| s.grid() != grid) {
            return Err(Error::GridMismatch {
                expected: grid.n(),
                found: bad.grid().n(),
            });
        }
        Ok(Self {
            config,
            forced,
            steps,
            times,
            snapshots,
            forcing_integral: 0.0,
        })
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn nu(&self) -> f64 {
        self.config.nu
    }

    pub fn forced(&self) -> bool {
        self.forced
    }

    pub fn grid(&self) -> GridSpec {
        self.snapshots[0].grid()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn snapshots(&self) -> &[ScalarField] {
        &self.snapshots
    }

    pub fn initial(&self) -> &ScalarField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &ScalarField {
        self.snapshots.last().expect("trajectory holds the initial datum")
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// Iterator over `(t, field)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &ScalarField)> {
        self.times.iter().copied().zip(self.snapshots.iter())
    }

    /// Velocity of snapshot `i`.
    pub fn velocity(&self, i: usize) -> Result<VectorField> {
        spectral::biot_savart(&self.snapshots[i])
    }

    /// A priori bound `‖ω₀‖_∞ + ∫₀ᵀ‖g‖_∞`.
    pub fn omega_bound(&self) -> f64 {
        self.initial().max_abs() + self.forcing_integral
    }

    /// Largest `‖ω(t)‖_∞` over the stored snapshots.
    pub fn max_linf(&self) -> f64 {
        self.snapshots.iter().map(ScalarField::max_abs).fold(0.0, f64::max)
    }

    /// Applies `f` to every snapshot, keeping times and configuration.
    pub fn map_fields(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            snapshots: self.snapshots.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Velocity snapshots as an archive for particle tracking and transport.
    pub fn to_archive(&self) -> Result<VelocityArchive> {
        let fields = (0..self.len()).map(|i| self.velocity(i)).collect::<Result<Vec<_>>>()?;
        let spacing = self
            .times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
            .max(self.config.dt);
        Ok(VelocityArchive::new(self.times.clone(), fields, spacing)?
            .with_provenance(self.config.nu, self.forced))
    }

    /// Writes `omega_<step>.yud` snapshots, `index.csv` and `run.cfg` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut index = csv::Writer::from_path(dir.join(INDEX_FILE))?;
        index.write_record(["step", "time", "energy", "enstrophy", "linf"])?;
        for ((&step, &t), field) in self.steps.iter().zip(&self.times).zip(&self.snapshots) {
            field.write_snapshot(&dir.join(snapshot_name(step)), t)?;
            let e = energy(field);
            index.write_record(&[
                step.to_string(),
                t.to_string(),
                e.to_string(),
                enstrophy(field).to_string(),
                field.max_abs().to_string(),
            ])?;
        }
        index.flush()?;
        let c = &self.config;
        let mut meta = fs::File::create(dir.join(META_FILE))?;
        writeln!(meta, "n = {}", self.grid().n())?;
        writeln!(meta, "nu = {}", c.nu)?;
        writeln!(meta, "dt = {}", c.dt)?;
        writeln!(meta, "t_end = {}", c.t_end)?;
        writeln!(meta, "snapshot_stride = {}", c.snapshot_stride)?;
        writeln!(meta, "dealias = {}", c.dealias)?;
        writeln!(meta, "forced = {}", self.forced)?;
        Ok(())
    }

    /// Reads a directory written by [`Trajectory::write_dir`]. Forcing
    /// functions are not persisted; only the `forced` flag survives.
    pub fn read_dir(dir: &Path) -> Result<Self> {
        let meta = fs::read_to_string(dir.join(META_FILE))?;
        let get = |key: &str| -> Result<&str> {
            meta.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .map(|(_, v)| v.trim())
                .ok_or_else(|| invalid("run.cfg", format!("missing key `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| invalid("run.cfg", format!("bad value for `{key}`")))
        };
        let mut config = SimulationConfig::new(num("nu")?, num("dt")?, num("t_end")?)
            .with_stride(num("snapshot_stride")? as usize);
        config.dealias = get("dealias")? == "true";
        let forced = get("forced")? == "true";

        let mut reader = csv::Reader::from_path(dir.join(INDEX_FILE))?;
        let (mut steps, mut times, mut snapshots) = (Vec::new(), Vec::new(), Vec::new());
        for rec in reader.records() {
            let rec = rec?;
            let step: usize = rec[0]
                .parse()
                .map_err(|_| invalid("index.csv", "bad step"))?;
            let (field, t) = ScalarField::read_snapshot(&dir.join(snapshot_name(step)))?;
            steps.push(step);
            times.push(t);
            snapshots.push(field);
        }
        Self::from_parts(config, forced, steps, times, snapshots)
    }
}

fn snapshot_name(step: usize) -> String {
    format!("omega_{step:06}.yud")
}
