//! `qcorr` — quantum-correlation measures for the bound entangled state
//! catalogue from the command line.
//!
//! Subcommands: `info` (state diagnostics), `measure` (GD/MIN bounds,
//! exact values and Monte Carlo estimates), `sweep` (parameter scans to
//! CSV/JSON), `figure2` (histogram of sampled GD disturbances for the
//! Tiles state).
//!
//! Exit codes: 0 success, 2 usage/parse error, 3 domain/validation error,
//! 4 I/O error. `QCORR_THREADS` overrides the worker count without
//! affecting any output.

mod output;
mod run;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Geometric discord and measurement-induced nonlocality for bound entangled states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dimensions, validation defects, marginal spectrum, PPT flag,
    /// negativity and Bloch norms of a state.
    Info {
        /// State spec, e.g. "horodecki2x4:a=0.5", "werner:m=4,z=0.3", "tiles".
        spec: String,
    },
    /// Evaluate GD and/or MIN: closed forms, eigenvalue bounds, exact
    /// values where available, and sampled estimates when --trials is set.
    Measure {
        /// State spec, e.g. "pyramid" or "horodecki3x3:beta=2.5".
        spec: String,
        /// Which measure(s) to evaluate.
        which: Which,
        #[command(flatten)]
        sampler: SamplerArgs,
    },
    /// Scan one family parameter and write a row per grid point.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Base state spec; the swept parameter overrides its value.
        spec: String,
        /// Parameter to sweep (e.g. a, beta, z).
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Output file path.
        #[arg(long)]
        out: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Sample GD disturbances of the Tiles state and write the histogram
    /// together with the eigenvalue bound and the best sampled value.
    Figure2 {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 60)]
        bins: usize,
        /// Output file path.
        #[arg(long)]
        out: String,
        /// Refine the best candidate by local rotations.
        #[arg(long, default_value_t = false)]
        refine: bool,
    },
}

#[derive(Args, Clone, Copy)]
struct SamplerArgs {
    /// Monte Carlo trial count; sampling is skipped when absent.
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed for the deterministic trial streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Refine the best candidate by local rotations.
    #[arg(long, default_value_t = false)]
    refine: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Gd,
    Min,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
enum AppError {
    Core(CoreError),
    Io(std::io::Error),
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(CoreError::Parse { .. }) => 2,
            AppError::Core(_) => 3,
            AppError::Io(_) => 4,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match std::env::var("QCORR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(threads) if threads > 0 => {
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| run::dispatch(cli.command)),
                Err(e) => {
                    eprintln!("error: {e}");
                    std::process::exit(3);
                }
            }
        }
        _ => run::dispatch(cli.command),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
