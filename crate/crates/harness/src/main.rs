use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use yudovich::diagnostics::{besov_index, distribution, enstrophy, energy, palinstrophy, wasserstein1, write_rows, DiagnosticRow};
use yudovich::dynamics::{evolve, SimulationConfig, Trajectory};

use yudovich_harness::experiments::e6_functionals::calibrate;
use yudovich_harness::report::nu_label;
use yudovich_harness::{run_experiment, Constants, ExperimentId, RunConfig};

#[derive(Parser)]
#[command(name = "yudovich", version, about = "Vanishing-viscosity experiments for 2D incompressible flow")]
struct Cli {
    /// Run configuration (`[run]` and `[E1]`..`[E7]` sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Restrict to one experiment.
    #[arg(long, global = true)]
    experiment: Option<ExperimentId>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Top-level seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ladders and ensembles.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the datum of one experiment at a single viscosity and store the trajectory.
    Simulate {
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
    },
    /// Run the viscosity-sweep experiments (E1 to E6, or the one selected).
    Sweep,
    /// Run the stochastic Lagrangian experiment (E7).
    Lagrangian,
    /// Diagnose a stored trajectory, or recalibrate the frozen constants.
    Diagnose {
        /// Trajectory directory written by `simulate`.
        #[arg(long, required_unless_present = "calibrate")]
        input: Option<PathBuf>,
        /// Fit the functional constants on the corpus and write `constants.ini`.
        #[arg(long)]
        calibrate: bool,
    },
    /// Summarize the checks of every experiment found under the output directory.
    Report,
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    Ok(cfg)
}

fn constants(cfg: &RunConfig) -> anyhow::Result<Constants> {
    Ok(match &cfg.constants {
        Some(p) => Constants::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => Constants::builtin(),
    })
}

fn run_and_write(cfg: &RunConfig, ids: &[ExperimentId]) -> anyhow::Result<bool> {
    let constants = constants(cfg)?;
    let mut all_passed = true;
    for &id in ids {
        let spec = cfg.spec(id)?;
        eprintln!("running {id} ({}) on {} at n = {}", id.title(), spec.data.describe(), spec.n);
        let report = run_experiment(&spec, &constants).with_context(|| format!("experiment {id}"))?;
        report.write(&spec.out)?;
        print!("{}", report.summary());
        all_passed &= report.passed();
    }
    Ok(all_passed)
}

fn selected(cli: &Cli, default: &[ExperimentId]) -> Vec<ExperimentId> {
    cli.experiment.map_or_else(|| default.to_vec(), |id| vec![id])
}

fn diagnose(input: &Path, out: &Path) -> anyhow::Result<()> {
    let traj = Trajectory::read_dir(input).with_context(|| format!("reading {}", input.display()))?;
    let pi0 = distribution(traj.initial());
    let nu = traj.nu();
    let mut rows = Vec::new();
    for (t, w) in traj.iter() {
        let mut push = |q: &str, v: f64| rows.push(DiagnosticRow::new("diagnose", t, nu, q, v));
        push("energy", energy(w));
        push("enstrophy", enstrophy(w));
        push("palinstrophy", palinstrophy(w));
        push("linf", w.max_abs());
        push("w1_to_initial", wasserstein1(&distribution(w), &pi0)?);
        if let Ok(b) = besov_index(w, 2.0) {
            push("besov_index", b.index);
        }
    }
    std::fs::create_dir_all(out)?;
    let path = out.join("diagnostics.csv");
    write_rows(std::fs::File::create(&path)?, &rows)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}

fn report(out: &Path) -> anyhow::Result<bool> {
    let mut found = 0;
    let mut all_passed = true;
    for id in ExperimentId::ALL {
        let path = out.join(id.label()).join("checks.csv");
        if !path.exists() {
            continue;
        }
        found += 1;
        let mut reader = csv::Reader::from_path(&path)?;
        let (mut passed, mut failed) = (0, Vec::new());
        for rec in reader.records() {
            let rec = rec?;
            if &rec[2] == "true" {
                passed += 1;
            } else {
                failed.push(format!("{}: {}", &rec[1], &rec[3]));
            }
        }
        println!("{id} ({}): {passed} passed, {} failed", id.title(), failed.len());
        for f in &failed {
            println!("  FAIL {f}");
        }
        all_passed &= failed.is_empty();
    }
    if found == 0 {
        bail!("no experiment results under {}", out.display());
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let cfg = load_config(cli)?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    match &cli.command {
        Command::Simulate { nu } => {
            let spec = cfg.spec(cli.experiment.unwrap_or(ExperimentId::E1))?;
            let traj = evolve(
                &spec.initial_data()?,
                &SimulationConfig::new(*nu, spec.dt, spec.t_end).with_stride(spec.stride),
            )?;
            let dir = cfg.out.join(format!("simulate_{}_{}", spec.id, nu_label(*nu)));
            traj.write_dir(&dir)?;
            println!("wrote {} snapshots to {}", traj.len(), dir.display());
            Ok(true)
        }
        Command::Sweep => {
            let ids = selected(cli, &ExperimentId::ALL[..6]);
            run_and_write(&cfg, &ids)
        }
        Command::Lagrangian => run_and_write(&cfg, &[ExperimentId::E7]),
        Command::Diagnose { input, calibrate: cal } => {
            if *cal {
                let spec = cfg.spec(ExperimentId::E6)?;
                let c = calibrate(&spec)?;
                std::fs::create_dir_all(&cfg.out)?;
                let path = cfg.out.join("constants.ini");
                std::fs::write(&path, c.to_ini())?;
                println!("wrote {}", path.display());
                print!("{}", c.to_ini());
            }
            if let Some(input) = input {
                diagnose(input, &cfg.out)?;
            }
            Ok(true)
        }
        Command::Report => report(&cfg.out),
    }
}
