//! Flat key-value run configuration. Values come from `--config` first and
//! are then overridden by any flag given on the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct Settings {
    /// Target JSON file, `power:R:K:N` or `random:N` (uses --seed).
    #[arg(long, global = true)]
    pub target: Option<String>,
    /// Largest denominator scanned.
    #[arg(long = "Q", global = true)]
    #[serde(rename = "Q", alias = "q")]
    pub q: Option<u64>,
    /// Decimal digits of the target enclosure.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// `lo:hi:count` (count equally spaced points, ends included) or a comma list.
    #[arg(long, global = true)]
    pub alpha_grid: Option<String>,
    /// Bracket width, as a rational or decimal (`1e-9`, `1/1000`).
    #[arg(long, global = true)]
    pub tol: Option<String>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomly generated targets.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; a manifest is written next to it. Standard output if absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Digits after the decimal point in decimal renderings.
    #[arg(long, global = true)]
    pub digits: Option<u32>,
    /// Engine records as JSON lines, used instead of running the engine.
    #[arg(long, global = true)]
    pub records: Option<PathBuf>,
    /// Fraction of the sequence tail used by the exponent estimates.
    #[arg(long, global = true)]
    pub tail_fraction: Option<String>,
    /// Cone system: zis, zis2, zis3 or custom.
    #[arg(long, global = true)]
    pub case: Option<String>,
    /// Cone system file in the line-oriented text format.
    #[arg(long, global = true)]
    pub system: Option<PathBuf>,
    /// Also compute the threshold of the system with all cuts and equalities.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure: Option<bool>,
    /// Also reconcile the reference matrix encoding against the first system.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconcile: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($f:ident),*) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    /// `self` takes precedence over `base`.
    pub fn over(self, base: Settings) -> Settings {
        let top = self;
        overlay!(
            base, top, target, q, precision, alpha_grid, tol, workers, seed, out, digits, records, tail_fraction,
            case, system, closure, reconcile
        )
    }

    pub fn load(path: &Path) -> Result<Settings, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }

    pub fn digits(&self) -> u32 {
        self.digits.unwrap_or(15)
    }
}
