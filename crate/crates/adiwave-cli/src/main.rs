//! Command-line front end wiring flag parsing to the solver library's
//! simulation, convergence-study, and benchmark entry points.
//!
//! Exit codes: 0 success, 2 usage (bad or unknown flags), 3 invalid
//! configuration, 4 divergence (a field norm became non-finite), 5 I/O
//! failure.

use adiwave::adi::{AdiConfig, Coupling};
use adiwave::bench::{bench_csv, run_benchmark};
use adiwave::convergence::{report_csv, run_case, run_ladder, RunResult};
use adiwave::fields::{write_snapshot, Scheme};
use adiwave::manufactured::{ManufacturedCase, DEFAULT_LAMBDA, DEFAULT_PERIOD};
use adiwave::parallel::WorkerPool;
use adiwave::Error;
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Default worker count when `--workers` is absent.
const WORKERS_ENV: &str = "ADIWAVE_WORKERS";

#[derive(Parser)]
#[command(
    name = "adiwave",
    version,
    about = "Fourth-order implicit solvers for 2-D acoustic wave propagation",
    after_help = "Exit codes: 0 success, 2 usage, 3 invalid configuration, \
                  4 divergence, 5 I/O failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one case and print a one-row run summary as CSV
    Simulate(SimulateArgs),
    /// Run a grid ladder and print the error/rate table as CSV
    Converge(ConvergeArgs),
    /// Time fixed-step runs per worker count and print the records as CSV
    Bench(BenchArgs),
}

/// Flags shared by every subcommand: the manufactured case and the
/// time-integration controls. Unset integration flags fall back to the
/// scheme defaults (cfl ceiling 0.91 cfd / 0.81 mfd, eps 1e-9, cap 8,
/// first check after 6, seidel coupling).
#[derive(Args)]
struct CaseArgs {
    /// Spatial scheme: cfd (nodal compact) or mfd (staggered mimetic)
    #[arg(long, value_parser = Scheme::parse)]
    scheme: Scheme,
    /// Amplitude of the polynomial part of the manufactured profile
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Exponent of the polynomial part of the manufactured profile
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Wavelength of the sinusoidal part of the manufactured profile
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Temporal period of the manufactured solution
    #[arg(long, default_value_t = DEFAULT_PERIOD)]
    period: f64,
    /// Courant number; dt = cfl / (N * c_max)
    #[arg(long)]
    cfl: Option<f64>,
    /// Relative tolerance of the fixed-point inner iteration
    #[arg(long)]
    eps: Option<f64>,
    /// Iteration cap per implicit sweep
    #[arg(long = "k-max")]
    k_max: Option<usize>,
    /// Iterations to run before the first tolerance check
    #[arg(long = "min-check")]
    min_check: Option<usize>,
    /// Inner-iteration coupling: seidel or jacobi
    #[arg(long, value_parser = Coupling::parse)]
    coupling: Option<Coupling>,
}

impl CaseArgs {
    fn case(&self) -> ManufacturedCase {
        let mut case = ManufacturedCase::with_polynomial(self.gamma, self.k);
        case.lambda = self.lambda;
        case.period = self.period;
        case
    }

    fn config(&self) -> AdiConfig {
        let mut cfg = AdiConfig::for_scheme(self.scheme);
        if let Some(v) = self.cfl {
            cfg.cfl = v;
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.k_max {
            cfg.k_max = v;
        }
        if let Some(v) = self.min_check {
            cfg.min_iters_before_check = v;
        }
        if let Some(v) = self.coupling {
            cfg.coupling = v;
        }
        cfg
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CaseArgs,
    /// Cells per side
    #[arg(long)]
    n: usize,
    /// Temporal periods to integrate
    #[arg(long, default_value_t = 5.0)]
    periods: f64,
    /// Worker threads (default: ADIWAVE_WORKERS, else 1)
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the final field snapshot to this path
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CaseArgs,
    /// Grid ladder as a comma-separated list, e.g. 16,24,32,48,64
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Temporal periods to integrate on every rung
    #[arg(long, default_value_t = 5.0)]
    periods: f64,
    /// Worker threads (default: ADIWAVE_WORKERS, else 1)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CaseArgs,
    /// Cells per side
    #[arg(long)]
    n: usize,
    /// Worker counts to time, comma-separated (default: ADIWAVE_WORKERS, else 1)
    #[arg(long, value_delimiter = ',')]
    workers: Option<Vec<usize>>,
    /// Fixed steps to time per worker count
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

// -- error-to-exit-code plumbing ----------------------------------------------

enum CliError {
    Config(String),
    Diverged(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => diagnostic("invalid configuration", &msg, 3),
        Err(CliError::Diverged(msg)) => diagnostic("diverged", &msg, 4),
        Err(CliError::Io(msg)) => diagnostic("i/o failure", &msg, 5),
    }
}

fn diagnostic(kind: &str, msg: &str, code: u8) -> ExitCode {
    eprintln!("adiwave: {kind}: {msg}");
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Converge(args) => converge(args),
        Command::Bench(args) => bench(args),
    }
}

/// `--workers` wins; otherwise the environment variable; otherwise 1.
fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV} is not a count: '{raw}'"))),
        Err(_) => Ok(None),
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize, CliError> {
    let workers = match flag {
        Some(w) => w,
        None => workers_from_env()?.unwrap_or(1),
    };
    if workers == 0 {
        return Err(CliError::Config("worker count must be positive".into()));
    }
    Ok(workers)
}

fn emit(csv: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            out.write_all(csv.as_bytes())?;
            out.flush()?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let workers = resolve_workers(args.workers)?;
    let pool = WorkerPool::new(workers);
    let run = run_case(
        args.common.scheme,
        &args.common.case(),
        args.n,
        &args.common.config(),
        args.periods,
        &pool,
    )?;
    print!("{}", summary_csv(&args, workers, &run));
    if let Some(path) = &args.output {
        let mut out = BufWriter::new(File::create(path)?);
        write_snapshot(&run.final_state, &mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn summary_csv(args: &SimulateArgs, workers: usize, run: &RunResult) -> String {
    let mut out = String::from(
        "scheme,gamma,k,N,workers,dt,steps,error_fro,avg_inner_iters,\
         max_inner_iters,all_converged,wall_time_s\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{:e},{:.3},{},{},{:.6}\n",
        args.common.scheme.tag(),
        args.common.gamma,
        args.common.k,
        run.n,
        workers,
        run.dt,
        run.steps,
        run.error_fro,
        run.avg_inner_iters,
        run.max_inner_iters,
        run.all_converged,
        run.wall_time_s,
    ));
    out
}

fn converge(args: ConvergeArgs) -> Result<(), CliError> {
    let workers = resolve_workers(args.workers)?;
    let pool = WorkerPool::new(workers);
    let report = run_ladder(
        args.common.scheme,
        &args.common.case(),
        &args.n,
        &args.common.config(),
        args.periods,
        &pool,
    )?;
    emit(&report_csv(&report), args.output.as_deref())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let workers = match args.workers {
        Some(list) => list,
        None => vec![workers_from_env()?.unwrap_or(1)],
    };
    if workers.contains(&0) {
        return Err(CliError::Config("worker counts must be positive".into()));
    }
    let records = run_benchmark(
        args.common.scheme,
        &args.common.case(),
        args.n,
        &args.common.config(),
        &workers,
        args.steps,
    )?;
    emit(&bench_csv(&records), args.output.as_deref())
}
