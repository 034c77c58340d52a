//! Memoized engine runs under `DIOPHANT_CACHE_DIR`, keyed by a hash of the
//! exact target enclosure, the bound and the library version.

use std::path::PathBuf;

use diophant::approx::{best_approx_sequence_par, ApproxRun, TargetVector};

use crate::report::sha256_hex;
use crate::Failure;

pub const ENV: &str = "DIOPHANT_CACHE_DIR";

fn key(target: &TargetVector, q_max: u64) -> Result<String, Failure> {
    let body = serde_json::to_string(&(env!("CARGO_PKG_VERSION"), target, q_max)).map_err(Failure::other)?;
    Ok(sha256_hex(body.as_bytes()))
}

/// Runs the engine, reusing a cached result when one exists. Returns whether
/// the cache was hit.
pub fn engine_run(target: &TargetVector, q_max: u64) -> Result<(ApproxRun, bool), Failure> {
    let dir = std::env::var_os(ENV).map(PathBuf::from);
    let path = match &dir {
        Some(d) => Some(d.join(format!("{}.json", key(target, q_max)?))),
        None => None,
    };
    if let Some(p) = &path {
        if let Some(run) = std::fs::read_to_string(p)
            .ok()
            .and_then(|s| serde_json::from_str::<ApproxRun>(&s).ok())
        {
            return Ok((run, true));
        }
    }
    let run = best_approx_sequence_par(target, q_max).map_err(Failure::input)?;
    if let (Some(d), Some(p)) = (&dir, &path) {
        std::fs::create_dir_all(d).map_err(Failure::other)?;
            let tmp = p.with_extension(format!("{}.tmp", std::process::id()));
        std::fs::write(&tmp, serde_json::to_string(&run).map_err(Failure::other)?).map_err(Failure::other)?;
        std::fs::rename(&tmp, p).map_err(Failure::other)?;
    }
    Ok((run, false))
}
