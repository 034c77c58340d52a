//! Best simultaneous approximations by exhaustive, certified enumeration.

mod engine;
mod target;

use thiserror::Error;

use crate::arith::ArithError;

pub use engine::{best_approx_sequence, best_approx_sequence_par, psi, ApproxRun, BestApproxRecord, RecordLine};
pub use target::{generate_power_basis, TargetFile, TargetVector, MAX_DIM};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("dimension {0} outside 1..=8")]
    Dimension(usize),
    #[error("component {index} has width {width} exceeding 10^-{digits}")]
    TooWide {
        index: usize,
        width: String,
        digits: u32,
    },
    #[error("declared n = {declared} but {found} components were given")]
    ComponentCount { declared: usize, found: usize },
    #[error("bound must be at least 1")]
    ZeroBound,
    #[error("{0} is a perfect power of the requested degree")]
    PerfectPower(String),
    #[error("invalid root request: {0}")]
    InvalidRoot(String),
    #[error("exact hit at q = {0}: the target is rational at this precision")]
    ExactHit(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}
