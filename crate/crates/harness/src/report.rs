use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use yudovich::diagnostics::{energy, enstrophy, write_rows, DiagnosticRow};
use yudovich::dynamics::Trajectory;

use crate::error::Result;
use crate::rate::RateFit;
use crate::spec::ExperimentId;
use crate::sweep::GuardReport;
use crate::svg::Plot;

/// One asserted property of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Per-run time series written as one file per ladder member.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    /// `(time, energy, enstrophy, ‖ω‖_∞)`.
    pub rows: Vec<[f64; 4]>,
}

impl RunSummary {
    pub fn of(label: impl Into<String>, traj: &Trajectory) -> Self {
        Self {
            label: label.into(),
            rows: traj
                .iter()
                .map(|(t, w)| [t, energy(w), enstrophy(w), w.max_abs()])
                .collect(),
        }
    }
}

/// Everything an experiment measured, asserted and plotted.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub id: ExperimentId,
    pub rows: Vec<DiagnosticRow>,
    pub checks: Vec<Check>,
    pub fits: Vec<(String, RateFit)>,
    pub plots: Vec<(String, Plot)>,
    pub guard: Option<GuardReport>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentReport {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            rows: Vec::new(),
            checks: Vec::new(),
            fits: Vec::new(),
            plots: Vec::new(),
            guard: None,
            runs: Vec::new(),
        }
    }

    pub fn row(&mut self, time: f64, nu: f64, quantity: impl Into<String>, value: f64) {
        self.rows.push(DiagnosticRow::new(self.id.label(), time, nu, &quantity.into(), value));
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn fit_named(&self, name: &str) -> Option<&RateFit> {
        self.fits.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// Writes `rows.csv`, `checks.csv`, `fits.csv`, `guard.txt`, one SVG per
    /// plot and `runs/<label>.csv` per run into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_rows(BufWriter::new(File::create(dir.join("rows.csv"))?), &self.rows)?;

        let mut checks = csv::Writer::from_path(dir.join("checks.csv"))?;
        checks.write_record(["experiment", "check", "passed", "detail"])?;
        for c in &self.checks {
            checks.write_record([self.id.label(), &c.name, if c.passed { "true" } else { "false" }, &c.detail])?;
        }
        checks.flush()?;

        let mut fits = csv::Writer::from_path(dir.join("fits.csv"))?;
        fits.write_record(["fit", "slope", "intercept", "r_squared", "residuals"])?;
        for (name, f) in &self.fits {
            let res: Vec<String> = f.residuals.iter().map(|r| format!("{r:e}")).collect();
            fits.write_record([
                name.clone(),
                format!("{:e}", f.slope),
                format!("{:e}", f.intercept),
                format!("{:e}", f.r_squared),
                res.join(";"),
            ])?;
        }
        fits.flush()?;

        if let Some(g) = &self.guard {
            fs::write(dir.join("guard.txt"), format!("{g}\n"))?;
        }
        for (name, plot) in &self.plots {
            fs::write(dir.join(format!("{name}.svg")), plot.render())?;
        }
        if !self.runs.is_empty() {
            let runs = dir.join("runs");
            fs::create_dir_all(&runs)?;
            for r in &self.runs {
                let mut w = BufWriter::new(File::create(runs.join(format!("{}.csv", r.label)))?);
                writeln!(w, "time,energy,enstrophy,linf")?;
                for row in &r.rows {
                    writeln!(w, "{:e},{:e},{:e},{:e}", row[0], row[1], row[2], row[3])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    /// One line per check, for terminal output.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} ({}): {}\n",
            self.id,
            self.id.title(),
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            s.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        if let Some(g) = &self.guard {
            s.push_str(&format!("  guard: {g}\n"));
        }
        s
    }
}

/// File-name label of a viscosity, e.g. `nu_5e-4`.
pub fn nu_label(nu: f64) -> String {
    if nu == 0.0 {
        "nu_0".into()
    } else {
        format!("nu_{nu:e}")
    }
}

/// `true` when every element is strictly below its predecessor.
pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Formats a list compactly for check details.
pub fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}
