mod cache;
mod commands;
mod report;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::Settings;

/// Certified simultaneous Diophantine approximation and the bounds built on it.
#[derive(Parser, Debug)]
#[command(name = "diophant", version)]
struct Cli {
    /// Flat JSON object with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Best approximation records as JSON lines.
    BestApprox,
    /// Per-record exponent ratios as CSV, with tail estimates in the manifest.
    Exponents,
    /// Detected index chains as JSON.
    DetectIndex,
    /// Engine, exponents, chains and the resulting lower bound as one CSV row.
    Pipeline,
    /// Root functions and bounds over an omega-hat grid as CSV.
    GTable,
    /// Critical growth ratios of the cone systems against their polynomials.
    VerifyCones,
    /// Variant polynomials against the third root function as CSV.
    Remark2,
    /// The (u, v) system over an alpha grid as CSV.
    UvSolve,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BestApprox => "best-approx",
            Command::Exponents => "exponents",
            Command::DetectIndex => "detect-index",
            Command::Pipeline => "pipeline",
            Command::GTable => "g-table",
            Command::VerifyCones => "verify-cones",
            Command::Remark2 => "remark2",
            Command::UvSolve => "uv-solve",
        }
    }
}

/// Exit status classes: 2 for unusable input, 3 when the target turned out
/// to be rational, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    ExactHit(u64),
    Check(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn input(msg: impl std::fmt::Display) -> Self {
        Failure::Input(msg.to_string())
    }

    pub fn other(e: impl Into<anyhow::Error>) -> Self {
        Failure::Other(e.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::ExactHit(_) => 3,
            Failure::Check(_) | Failure::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "bad input: {m}"),
            Failure::ExactHit(q) => write!(f, "exact hit at q = {q}; output truncated there"),
            Failure::Check(m) => write!(f, "verification failed: {m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let settings = match &cli.config {
        Some(path) => cli.settings.over(Settings::load(path)?),
        None => cli.settings,
    };
    if let Some(w) = settings.workers {
        if w == 0 {
            return Err(Failure::input("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(Failure::other)?;
    }
    commands::dispatch(cli.command, &settings)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("diophant: {f}");
            ExitCode::from(f.code())
        }
    }
}
