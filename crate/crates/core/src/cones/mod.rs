//! Parametric simplicial cone systems, exact certificates for their
//! intersection with a hyperplane, and the critical growth ratio at which the
//! intersection first appears.

mod expr;
mod simplex;
mod system;
mod verify;

use thiserror::Error;

use crate::arith::{ArithError, Interval};
use crate::roots::RootError;

pub use expr::Expr;
pub use simplex::{Farkas, LinearSystem, LpOutcome};
pub use system::{
    builtin_system, g_matrix_system, AffineForms, Case, ConeSystem, Coord, Instance, Row, G_MATRIX_TEXT,
};
pub use verify::{
    closure_threshold, cone_meets_hyperplane, critical_g, extreme_rays, matching_polynomial, reconcile,
    solve_uv, verify_cone_system, ApexCertificate, ClosureThreshold, CriticalG, HyperplaneTest, CriticalPoint,
    ConeReport, RaySet, Reconciliation, RowMatch, TestCertificate, UvSolution, Witness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("constraint matrix is singular")]
    Singular,
    #[error("feasibility predicate changes more than once: {}", fmt_flips(.flips))]
    NonMonotone { flips: Vec<Interval> },
    #[error("no crossing of the hyperplane found on (0, {bound}]")]
    NoCrossing { bound: String },
    #[error("{0} leaves (0, 1)")]
    OutOfRange(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Root(#[from] RootError),
}

fn fmt_flips(flips: &[Interval]) -> String {
    flips.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
