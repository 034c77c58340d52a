//! Exact rational scalars, closed rational intervals, dense rational matrices
//! and certified enclosures of a few elementary functions.

pub mod elementary;
pub mod interval;
pub mod matrix;
pub mod rational;

use thiserror::Error;

pub use interval::Interval;
pub use matrix::{int_det, int_rank, RationalMatrix};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("interval lower bound exceeds upper bound")]
    InvertedInterval,
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rows of unequal length")]
    Ragged,
    #[error("empty input")]
    EmptyInput,
    #[error("argument outside the domain: {0}")]
    Domain(String),
}
