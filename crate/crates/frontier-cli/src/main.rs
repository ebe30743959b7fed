//! `frontier` — command-line surface over the analytics and simulation
//! library: spectral constants, finite-interval spectra, kernel grids,
//! Monte Carlo campaigns, descendant-count sampling, CSBP Laplace flows,
//! and an analytic-vs-empirical verification scorecard.
//!
//! Conventions shared by every subcommand:
//!
//! * exit 0 on success, 1 on domain errors (message on stderr), 2 on
//!   verification failures (the scorecard is still written), 64 on usage
//!   errors;
//! * all randomness flows from the `--seed` flag — no wall clock or OS
//!   entropy anywhere, so identical invocations give identical bytes;
//! * files are written atomically (temp file + rename);
//! * JSON outputs share the top-level schema
//!   `{config, results, versions, seed}`; CSV outputs carry `#`-prefixed
//!   provenance comments above the header row;
//! * `FRONTIER_THREADS` caps replica parallelism (a pure performance
//!   knob: outputs are independent of the thread count).

mod cmd_csbp;
mod cmd_escape;
mod cmd_kernel;
mod cmd_regimes;
mod cmd_simulate;
mod cmd_spectrum;
mod cmd_verify;
mod out;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// How a subcommand can fail, mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid input or an I/O problem: exit 1, message on stderr.
    Domain(String),
    /// The verification suite found disagreements: exit 2. Outputs are
    /// already on disk when this is raised.
    Verification,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "frontier",
    version,
    about = "Spectral analytics and Monte Carlo simulation of a branching Brownian front held at an absorbing boundary"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase classification and interval-independent constants for a given ρ
    Regimes(cmd_regimes::RegimesArgs),
    /// Finite-interval eigenvalues with brackets, norms, and residuals
    Spectrum(cmd_spectrum::SpectrumArgs),
    /// Evaluation grids of the spectral kernels
    #[command(subcommand)]
    Kernel(cmd_kernel::KernelCmd),
    /// Monte Carlo replicas of the branching particle system
    Simulate(cmd_simulate::SimulateArgs),
    /// Descendant-count sampler at a deep absorbing boundary
    Escape(cmd_escape::EscapeArgs),
    /// CSBP Laplace-flow evaluation and branching-constant fits
    Csbp(cmd_csbp::CsbpArgs),
    /// Compare empirical moments against analytic predictions
    Verify(cmd_verify::VerifyArgs),
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(64)
                }
            };
        }
    };
    let outcome = match cli.cmd {
        Cmd::Regimes(args) => cmd_regimes::run(args),
        Cmd::Spectrum(args) => cmd_spectrum::run(args),
        Cmd::Kernel(cmd) => cmd_kernel::run(cmd),
        Cmd::Simulate(args) => cmd_simulate::run(args),
        Cmd::Escape(args) => cmd_escape::run(args),
        Cmd::Csbp(args) => cmd_csbp::run(args),
        Cmd::Verify(args) => cmd_verify::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(2),
    }
}

/// Applies `FRONTIER_THREADS` to the global replica pool. Thread count
/// never changes any output, only wall time.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("FRONTIER_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                // Ignore the error if a pool was already installed.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
