//! Command-line driver for the perfport miniapps.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perfport_core::bench::{run_benchmark, write_csv, AppConfig, BenchConfig, BenchReport, FinalState};
use perfport_core::grid::VorticityConfig;
use perfport_core::nbody::{LJParams, NBodyConfig, SimBox};
use perfport_core::timing::MonotonicClock;
use perfport_core::{Backend, Layout};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "perfport", version, about = "Benchmark the N-body and vorticity miniapps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All-pairs Lennard-Jones molecular dynamics over a ring of ranks.
    Nbody(NbodyArgs),
    /// Vorticity/stream-function flow on a 2-D rank grid.
    Vorticity(VorticityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Row,
    Col,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Cavity,
    TaylorGreen,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Number of in-process ranks.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub ranks: u64,
    #[arg(long, value_enum, default_value_t = BackendArg::Sequential)]
    pub backend: BackendArg,
    /// Worker threads per rank for the parallel backend [default: available cores].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Repetitions of the whole simulation loop.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Raw timing CSV; the summary goes to the `.summary.csv` sibling.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write per-rank VTK files of the final step here.
    #[arg(long)]
    pub vtk_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = LayoutArg::Row)]
    pub layout: LayoutArg,
}

#[derive(Debug, Args)]
pub struct NbodyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub particles: u64,
    #[arg(long, default_value_t = 100)]
    pub steps: u64,
    #[arg(long, default_value_t = 0.001)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Periodic box edge length [default: 1.5 sigma per lattice site].
    #[arg(long = "box")]
    pub box_length: Option<f64>,
    /// Skip the per-step energy reduction.
    #[arg(long)]
    pub no_reduction: bool,
}

#[derive(Debug, Args)]
pub struct VorticityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub nx: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub ny: u64,
    #[arg(long, default_value_t = 10)]
    pub steps: u64,
    /// Jacobi stopping tolerance on the global max update.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.01)]
    pub nu: f64,
    #[arg(long, value_enum, default_value_t = ScenarioArg::Cavity)]
    pub scenario: ScenarioArg,
    /// Fixed timestep [default: from the stability bound].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Jacobi iteration cap per solve [default: 10 nx ny].
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_jacobi_iters: Option<u64>,
}

/// A fully validated run.
#[derive(Debug)]
pub struct RunPlan {
    pub bench: BenchConfig,
    pub csv: Option<PathBuf>,
}

fn positive(name: &str, value: f64) -> Result<f64, String> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("--{name} must be a positive number, got {value}"))
    }
}

fn layout(arg: LayoutArg) -> Layout {
    match arg {
        LayoutArg::Row => Layout::RowMajor,
        LayoutArg::Col => Layout::ColMajor,
    }
}

fn backend(common: &CommonArgs) -> Result<Backend, String> {
    match (common.backend, common.workers) {
        (BackendArg::Sequential, Some(_)) => {
            Err("--workers only applies to --backend parallel".into())
        }
        (BackendArg::Sequential, None) => Ok(Backend::sequential()),
        (BackendArg::Parallel, workers) => {
            let w = workers.map(|w| w as usize).unwrap_or_else(|| {
                std::thread::available_parallelism().map_or(1, |n| n.get())
            });
            Backend::data_parallel(w).map_err(|e| e.to_string())
        }
    }
}

/// Turns parsed arguments into a run, rejecting contradictory or invalid
/// settings with a usage message.
pub fn plan(cli: Cli) -> Result<RunPlan, String> {
    let (common, app) = match cli.command {
        Command::Nbody(a) => {
            let params = LJParams::new(positive("epsilon", a.epsilon)?, positive("sigma", a.sigma)?);
            let particles = a.particles as usize;
            let sim_box = match a.box_length {
                Some(l) => SimBox::new(positive("box", l)?),
                None => SimBox::for_lattice(particles, params.sigma),
            };
            let config = NBodyConfig {
                particles,
                dt: positive("dt", a.dt)?,
                steps: a.steps as usize,
                params,
                sim_box,
                compute_energy: !a.no_reduction,
                seed: a.common.seed,
                layout: layout(a.common.layout),
                ..NBodyConfig::new(particles)
            };
            (a.common, AppConfig::Nbody(config))
        }
        Command::Vorticity(a) => {
            let base = match a.scenario {
                ScenarioArg::Cavity => VorticityConfig::cavity(a.nx as usize, a.ny as usize),
                ScenarioArg::TaylorGreen => {
                    VorticityConfig::taylor_green(a.nx as usize, a.ny as usize)
                }
            };
            let config = VorticityConfig {
                steps: a.steps as usize,
                tol: positive("tol", a.tol)?,
                nu: a.nu,
                dt: a.dt.map(|dt| positive("dt", dt)).transpose()?,
                max_jacobi_iters: a.max_jacobi_iters.map(|n| n as usize),
                layout: layout(a.common.layout),
                ..base
            };
            (a.common, AppConfig::Vorticity(config))
        }
    };
    let ranks = common.ranks as usize;
    app.validate(ranks).map_err(|e| e.to_string())?;
    Ok(RunPlan {
        bench: BenchConfig {
            app,
            reps: common.reps as usize,
            ranks,
            backend: backend(&common)?,
            vtk_dir: common.vtk_dir,
        },
        csv: common.csv,
    })
}

fn describe(report: &BenchReport, out: &mut impl Write) -> std::io::Result<()> {
    match &report.final_state {
        FinalState::Nbody(states) => {
            if let Some(e) = states[0].energies.last() {
                writeln!(out, "final total energy: {e}")?;
            }
        }
        FinalState::Vorticity(states) => {
            let reports = &states[0].reports;
            let iters: usize = reports.iter().map(|r| r.iterations).sum();
            writeln!(out, "Jacobi iterations (last rep): {iters} over {} steps", reports.len())?;
            if let Some(r) = reports.iter().find(|r| !r.converged) {
                eprintln!(
                    "warning: Jacobi hit the iteration cap ({} iterations, change {})",
                    r.iterations, r.final_change
                );
            }
        }
    }
    Ok(())
}

/// Parses `args`, runs the benchmark and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let plan = match plan(cli) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let report = match run_benchmark(&plan.bench, Arc::new(MonotonicClock::new())) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", report.summary);
    let _ = describe(&report, &mut stdout);
    if let Some(path) = &plan.csv {
        match write_csv(&report.records, &report.summary, path) {
            Ok(summary) => {
                let _ = writeln!(stdout, "wrote {} and {}", path.display(), summary.display());
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_RUNTIME;
            }
        }
    }
    for path in &report.vtk_files {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    0
}
