//! Command-line front end: scenario-driven simulations, attenuation
//! sweeps, dispersion tables, matrix-power benchmarks, and power-law fits,
//! each emitting CSV artifacts plus a `manifest.json` with checksums.
//!
//! Exit codes: `0` success, `2` configuration/validation error, `3`
//! numeric failure (divergence, overflow, non-convergence).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use lossywave::analysis::{fit_power_law, measure_damped_frequency, FitForm, PowerLawFit};
use lossywave::error::Error;
use lossywave::integrate::SolverConfig;
use lossywave::matfun::benchmark_power_methods;
use lossywave::modal::{classify_mode, dispersion_curve, eigendecompose, solve_modal, Regime};
use lossywave::report;
use lossywave::scenario::{Scenario, SolverChoice};
use lossywave::sweep::{probe_dofs_for, run_attenuation_sweep, run_simulation, SimOutput};

#[derive(Parser)]
#[command(name = "lossywave", version, about = "Lossy 1-D wave propagation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trajectory CSV(s).
    Simulate(RunArgs),
    /// Run one tone-burst simulation per carrier and fit the attenuation
    /// power law; writes samples and fit CSVs.
    Sweep(RunArgs),
    /// Write the modal dispersion table; optionally measure damped
    /// frequencies from free-decay runs.
    Dispersion(RunArgs),
    /// Benchmark the matrix fractional power routes on seeded inputs.
    MatpowBench(BenchArgs),
    /// Fit a power law to an existing samples CSV.
    Fit(FitArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the scenario's `outputs`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded in the manifest; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Solver choice; overrides `solver.solver_choice`.
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
}

#[derive(Args)]
struct BenchArgs {
    /// Matrix sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128")]
    sizes: Vec<usize>,
    /// Exponent in [0, 1]; both routes run at 0.5, eigen-only otherwise.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Repetitions per measurement (the median is reported).
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed recorded in the manifest.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitArgs {
    /// Existing samples CSV (`f,omega,x1,x2,ratio,alpha`).
    samples: PathBuf,
    /// Model to fit.
    #[arg(long, value_enum, default_value_t = FitFormArg::Pure)]
    form: FitFormArg,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed recorded in the manifest.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Direct,
    Modal,
    Both,
}

impl From<SolverArg> for SolverChoice {
    fn from(v: SolverArg) -> Self {
        match v {
            SolverArg::Direct => SolverChoice::Direct,
            SolverArg::Modal => SolverChoice::Modal,
            SolverArg::Both => SolverChoice::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FitFormArg {
    Pure,
    TwoTerm,
}

impl From<FitFormArg> for FitForm {
    fn from(v: FitFormArg) -> Self {
        match v {
            FitFormArg::Pure => FitForm::Pure,
            FitFormArg::TwoTerm => FitForm::TwoTerm,
        }
    }
}

/// One output file entry in the manifest.
#[derive(Serialize)]
struct FileRecord {
    path: String,
    sha256: String,
    bytes: usize,
}

/// Run manifest: everything needed to audit or reproduce a run. Timing
/// fields vary between runs; all other fields are deterministic.
#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    scenario: Option<serde_json::Value>,
    outputs: Vec<FileRecord>,
    metrics: serde_json::Map<String, serde_json::Value>,
    timings: Timings,
}

#[derive(Serialize)]
struct Timings {
    solve_seconds: f64,
    total_seconds: f64,
}

/// Collects artifacts and writes them (plus the manifest) at the end.
struct OutputSink {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl OutputSink {
    fn new(dir: &Path) -> Result<Self, Error> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, content: &str) -> Result<(), Error> {
        report::write_atomic(&self.dir.join(name), content)?;
        let digest = Sha256::digest(content.as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256,
            bytes: content.len(),
        });
        Ok(())
    }

    fn finish(
        self,
        command: &str,
        seed: u64,
        scenario: Option<&Scenario>,
        metrics: serde_json::Map<String, serde_json::Value>,
        solve_seconds: f64,
        started: Instant,
    ) -> Result<(), Error> {
        let scenario_echo = match scenario {
            Some(s) => Some(
                serde_json::to_value(s)
                    .map_err(|e| Error::Config(format!("scenario echo failed: {e}")))?,
            ),
            None => None,
        };
        let manifest = Manifest {
            tool: "lossywave",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            scenario: scenario_echo,
            outputs: self.files,
            metrics,
            timings: Timings {
                solve_seconds,
                total_seconds: started.elapsed().as_secs_f64(),
            },
        };
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| Error::Config(format!("manifest serialization failed: {e}")))?;
        report::write_atomic(&self.dir.join("manifest.json"), &text)?;
        Ok(())
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Simulate(args) => run_simulate(args, started),
        Command::Sweep(args) => run_sweep(args, started),
        Command::Dispersion(args) => run_dispersion(args, started),
        Command::MatpowBench(args) => run_matpow_bench(args, started),
        Command::Fit(args) => run_fit(args, started),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(exit_code_for(&e));
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::NumericFailure(_) | Error::ConvergenceFailure { .. } => 3,
        _ => 2,
    }
}

/// Load the scenario and apply CLI overrides.
fn load_scenario(args: &RunArgs) -> Result<(Scenario, PathBuf, u64), Error> {
    let mut scenario = Scenario::load(&args.config)?;
    if let Some(solver) = args.solver {
        scenario.solver.solver_choice = solver.into();
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&scenario.outputs));
    let seed = args.seed.unwrap_or(scenario.seed);
    scenario.validate()?;
    Ok((scenario, out, seed))
}

fn energy_drift_metric(traj: &lossywave::integrate::Trajectory) -> Option<f64> {
    let energy = traj.energy.as_ref()?;
    let e0 = *energy.first()?;
    let max_dev = energy.iter().fold(0.0_f64, |acc, &e| acc.max((e - e0).abs()));
    Some(if e0 > 0.0 { max_dev / e0 } else { max_dev })
}

fn run_simulate(args: RunArgs, started: Instant) -> Result<(), Error> {
    let (scenario, out, seed) = load_scenario(&args)?;
    let mut sink = OutputSink::new(&out)?;
    let mut metrics = serde_json::Map::new();

    let solve_start = Instant::now();
    let output = run_simulation(&scenario)?;
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    match &output {
        SimOutput::Single(traj) => {
            sink.write("trajectory.csv", &report::trajectory_csv(traj, &scenario.probes)?)?;
            if let Some(drift) = energy_drift_metric(traj) {
                metrics.insert("energy_drift_rel".into(), drift.into());
            }
        }
        SimOutput::Both {
            direct,
            modal,
            relative_l2,
        } => {
            sink.write(
                "trajectory_direct.csv",
                &report::trajectory_csv(direct, &scenario.probes)?,
            )?;
            sink.write(
                "trajectory_modal.csv",
                &report::trajectory_csv(modal, &scenario.probes)?,
            )?;
            sink.write(
                "comparison.csv",
                &format!("metric,value\nsolver_relative_l2,{relative_l2}\n"),
            )?;
            metrics.insert("solver_relative_l2".into(), (*relative_l2).into());
            if let Some(drift) = energy_drift_metric(direct) {
                metrics.insert("energy_drift_rel".into(), drift.into());
            }
        }
    }

    sink.finish("simulate", seed, Some(&scenario), metrics, solve_seconds, started)
}

fn run_sweep(args: RunArgs, started: Instant) -> Result<(), Error> {
    let (scenario, out, seed) = load_scenario(&args)?;
    if scenario.sweep.is_none() {
        return Err(Error::Config(
            "sweep subcommand needs a [sweep] section in the scenario".to_string(),
        ));
    }
    let mut sink = OutputSink::new(&out)?;
    let mut metrics = serde_json::Map::new();

    let solve_start = Instant::now();
    let outcome = run_attenuation_sweep(&scenario)?;
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    sink.write("samples.csv", &report::samples_csv(&outcome.samples))?;
    sink.write("fit.csv", &report::fit_csv(&outcome.fit))?;
    metrics.insert("y_hat".into(), outcome.fit.y_hat.into());
    metrics.insert("alpha0_hat".into(), outcome.fit.alpha0_hat.into());
    metrics.insert("alpha1_hat".into(), outcome.fit.alpha1_hat.into());
    metrics.insert("fit_residual".into(), outcome.fit.residual.into());

    sink.finish("sweep", seed, Some(&scenario), metrics, solve_seconds, started)
}

fn run_dispersion(args: RunArgs, started: Instant) -> Result<(), Error> {
    let (scenario, out, seed) = load_scenario(&args)?;
    let (alpha0, y) = match scenario.physics.damping {
        lossywave::integrate::DampingSpec::Fractional { alpha0, y } => (alpha0, y),
        _ => {
            return Err(Error::Config(
                "dispersion analysis needs fractional damping (alpha0, y); other kinds \
                 have no single power-law dispersion relation"
                    .to_string(),
            ))
        }
    };
    let mut sink = OutputSink::new(&out)?;
    let mut metrics = serde_json::Map::new();

    let config = scenario.solver_config()?;
    let system = lossywave::fem::AssembledSystem::assemble(scenario.mesh()?);

    let solve_start = Instant::now();
    let basis = eigendecompose(system.stiffness())?;
    let points = dispersion_curve(&basis, alpha0, y, config.c)?;
    sink.write("dispersion.csv", &report::dispersion_csv(&points))?;

    let m = scenario
        .dispersion
        .as_ref()
        .map_or(0, |d| d.free_decay_modes);
    if m > 0 {
        let rows = free_decay_rows(&scenario, &system, &basis, &config, alpha0, y, m)?;
        let mut csv = String::from("mode,omega,predicted,measured,relative_error\n");
        for r in &rows {
            use std::fmt::Write as _;
            writeln!(csv, "{},{},{},{},{}", r.0, r.1, r.2, r.3, r.4)
                .expect("writing to String cannot fail");
        }
        sink.write("free_decay.csv", &csv)?;
        let worst = rows.iter().fold(0.0_f64, |acc, r| acc.max(r.4));
        metrics.insert("free_decay_modes_measured".into(), rows.len().into());
        metrics.insert("free_decay_worst_relative_error".into(), worst.into());
    }
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    sink.finish("dispersion", seed, Some(&scenario), metrics, solve_seconds, started)
}

/// One free-decay measurement: `(mode, omega, predicted, measured,
/// relative_error)`.
type FreeDecayRow = (usize, f64, f64, f64, f64);

/// Free-decay frequency measurement for the lowest `m` oscillatory modes:
/// initialize the system on each mode shape, integrate, and read the
/// damped frequency back from the zero crossings.
#[allow(clippy::too_many_arguments)]
fn free_decay_rows(
    scenario: &Scenario,
    system: &lossywave::fem::AssembledSystem,
    basis: &lossywave::modal::ModalBasis,
    config: &SolverConfig,
    alpha0: f64,
    y: f64,
    m: usize,
) -> Result<Vec<FreeDecayRow>, Error> {
    let probe_dofs = probe_dofs_for(&scenario.probes, system)?;
    let mut decay_config = *config;
    decay_config.full_state_stride = 1;
    decay_config.record_energy = false;

    let mut rows = Vec::new();
    for mode in 0..basis.n_modes() {
        if rows.len() == m {
            break;
        }
        let omega = basis.omegas()[mode];
        if omega <= 0.0 {
            continue;
        }
        let regime = classify_mode(mode, omega, alpha0, y, config.c)?;
        if regime.regime != Regime::Underdamped {
            continue;
        }
        let predicted = regime
            .damped_freq
            .expect("underdamped modes have a damped frequency");

        let shape = basis.shape(mode);
        let q0 = basis.project(&shape)?;
        let qdot0 = lossywave::nalgebra::DVector::zeros(basis.n_modes());
        let traj = solve_modal(
            basis,
            &scenario.physics.damping,
            None,
            &decay_config,
            &q0,
            &qdot0,
            &probe_dofs,
        )?;
        let measured = measure_damped_frequency(&traj, &shape)?;
        let rel = (measured - predicted).abs() / predicted;
        rows.push((mode, omega, predicted, measured, rel));
    }
    Ok(rows)
}

fn run_matpow_bench(args: BenchArgs, started: Instant) -> Result<(), Error> {
    let mut sink = OutputSink::new(&args.out)?;
    let solve_start = Instant::now();
    let rows = benchmark_power_methods(&args.sizes, args.p, args.reps)?;
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    sink.write("benchmark.csv", &report::benchmark_csv(&rows))?;
    let mut metrics = serde_json::Map::new();
    let worst = rows.iter().fold(0.0_f64, |acc, r| acc.max(r.residual));
    metrics.insert("worst_residual".into(), worst.into());
    sink.finish("matpow-bench", args.seed, None, metrics, solve_seconds, started)
}

fn run_fit(args: FitArgs, started: Instant) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.samples)?;
    let samples = report::parse_samples_csv(&text)?;
    let solve_start = Instant::now();
    let fit: PowerLawFit = fit_power_law(&samples, args.form.into())?;
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    let mut sink = OutputSink::new(&args.out)?;
    sink.write("fit.csv", &report::fit_csv(&fit))?;
    let mut metrics = serde_json::Map::new();
    metrics.insert("y_hat".into(), fit.y_hat.into());
    metrics.insert("alpha0_hat".into(), fit.alpha0_hat.into());
    metrics.insert("alpha1_hat".into(), fit.alpha1_hat.into());
    sink.finish("fit", args.seed, None, metrics, solve_seconds, started)
}
