//! `covent` — command-line front end for the covering/entropy toolkit.
//!
//! Every run writes its artifacts into `--out-dir`, each stamped with a
//! hash of the resolved configuration so results can be traced back to
//! their inputs. Exit codes separate the three possible outcomes:
//!
//! * `0` — the requested computation succeeded,
//! * `2` — the request itself was unusable (bad flags, malformed JSON,
//!   inconsistent parameters); one JSON line on standard error explains,
//! * `3` — the request was valid and the toolkit ran to completion, but
//!   the mathematical goal was not reached (no certificate in the radius
//!   schedule, a certified tail bound refusing a radius, and so on); one
//!   JSON line on standard error explains.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Structured failure carried from a subcommand back to `main`.
pub enum CliError {
    /// The request could not be interpreted or was internally
    /// inconsistent; maps to exit code 2.
    Config(String),
    /// The computation ran honestly and reports a negative result; maps
    /// to exit code 3.
    Negative(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "covent",
    version,
    about = "Certified multi-covering searches and entropy lower bounds for entire functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walk a geometric radius schedule until a certified self-covering
    /// region is found, then emit the certificate and diagnostics.
    CoveringSearch(CoveringSearchArgs),
    /// Tabulate separated-orbit growth on a compact set and/or convert a
    /// covering certificate into an entropy lower bound.
    Entropy(EntropyArgs),
    /// Run the sparse-zero product walkthrough: window counts, a covering
    /// certificate, and the entropy bound it implies, with one verdict per
    /// claim.
    ExampleProduct(ExampleProductArgs),
    /// Sample randomized slit-plane configurations and report the largest
    /// certified quasihyperbolic diameter seen.
    MeasureD(MeasureDArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Seed for every randomized choice in the run; part of the
    /// configuration hash.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads for the numerical sweeps (default: all logical
    /// cores). Not part of the configuration hash: it never changes
    /// results, only wall time.
    #[arg(long)]
    threads: Option<usize>,

    /// Directory that receives every artifact of this run (created if
    /// missing). Not part of the configuration hash.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CoveringSearchArgs {
    /// Function description: inline JSON (first non-space character `{`)
    /// or a path to a JSON file.
    #[arg(long)]
    function: String,

    /// Covering multiplicity the certificate must reach.
    #[arg(long, default_value_t = 2)]
    n_cover: u32,

    /// First radius of the schedule.
    #[arg(long, default_value_t = 64.0)]
    r_start: f64,

    /// Multiplicative step between consecutive radii.
    #[arg(long, default_value_t = 2.0)]
    r_factor: f64,

    /// Number of radii tried before giving up.
    #[arg(long, default_value_t = 20)]
    r_steps: usize,

    /// Working hyperbolic-diameter budget for the certified region.
    #[arg(long, default_value_t = 0.1)]
    working_diameter: f64,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EntropyArgs {
    /// Function description: inline JSON or a path to a JSON file.
    #[arg(long)]
    function: String,

    /// Use the 2^LOG2 roots of unity as the compact set.
    #[arg(long, value_name = "LOG2", conflicts_with = "compact_set")]
    circle_points: Option<u32>,

    /// Compact set description: inline JSON or a path to a JSON file.
    #[arg(long)]
    compact_set: Option<String>,

    /// Largest orbit length tabulated.
    #[arg(long, default_value_t = 12)]
    n_max: u32,

    /// Separation scale for distinguishing orbits; repeat the flag for
    /// several columns (default 0.05).
    #[arg(long = "delta", value_name = "DELTA")]
    deltas: Vec<f64>,

    /// Covering-certificate JSON (stamped or raw) for the backward-orbit
    /// bound.
    #[arg(long)]
    certificate: Option<PathBuf>,

    /// Iterations per backward block when expanding a certificate.
    #[arg(long, default_value_t = 3)]
    block_depth: u32,

    /// Number of backward blocks when expanding a certificate.
    #[arg(long, default_value_t = 3)]
    blocks: u32,

    /// Forward-orbit steps used to screen for superattracting cycles.
    #[arg(long, default_value_t = 64)]
    period_budget: u32,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ExampleProductArgs {
    /// Comma-separated zero moduli, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "1e2,1e4,1e8,1e16")]
    zeros: Vec<f64>,

    /// Certified lower modulus for all remaining zeros (default: the
    /// square of the last listed modulus, at least twice it).
    #[arg(long)]
    tail_modulus: Option<f64>,

    /// Random targets checked per window claim.
    #[arg(long, default_value_t = 12)]
    samples: usize,

    /// Covering multiplicity requested from the certificate stage.
    #[arg(long, default_value_t = 3)]
    n_cover: u32,

    /// First radius of the certificate schedule.
    #[arg(long, default_value_t = 64.0)]
    r_start: f64,

    /// Radii tried by the certificate schedule (doubling each step).
    #[arg(long, default_value_t = 30)]
    r_steps: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MeasureDArgs {
    /// Which randomized family of slit configurations to sample.
    #[arg(long, value_enum)]
    scenario: Scenario,

    /// Reference radius of the sampled configurations.
    #[arg(long, default_value_t = 64.0)]
    radius: f64,

    /// Independent random configurations to measure.
    #[arg(long, default_value_t = 64)]
    trials: u32,

    /// Sector axis direction for the keyhole scenario.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,

    /// Relative witness clearance for the cut-annulus scenario.
    #[arg(long, default_value_t = 0.0625)]
    eps: f64,

    /// Excluded-disk radius exponent for the cut-annulus scenario.
    #[arg(long, default_value_t = 4)]
    jexp: u32,

    /// Avoided points per configuration in the cut-annulus scenario.
    #[arg(long, default_value_t = 2)]
    avoided: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    /// Keyhole: a large sector with a tube to a disk near the origin.
    Case1,
    /// Cut annulus: a doubled annulus with slits and excluded disks.
    Case2,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error("config", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };

    let outcome = match &cli.command {
        Command::CoveringSearch(args) => commands::covering_search(args),
        Command::Entropy(args) => commands::entropy_report(args),
        Command::ExampleProduct(args) => commands::example_product(args),
        Command::MeasureD(args) => commands::measure_d(args),
    };

    match outcome {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(CliError::Config(message)) => {
            emit_error("config", &message);
            ExitCode::from(2)
        }
        Err(CliError::Negative(message)) => {
            emit_error("negative", &message);
            ExitCode::from(3)
        }
    }
}

/// One machine-readable line on standard error.
fn emit_error(kind: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({ "kind": kind, "message": message })
    );
}
