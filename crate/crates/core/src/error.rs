use thiserror::Error;

use crate::dual_group::DualGroup;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: DualGroup, right: DualGroup },

    #[error("automorphism family {family} cannot act on {group}")]
    FamilyMismatch { family: &'static str, group: DualGroup },

    #[error("operation not supported on {0}")]
    UnsupportedGroup(DualGroup),

    #[error("empty set")]
    EmptySet,

    #[error("character {0} lies outside the positive cone")]
    NotInCone(String),

    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("operator has no terms; use HausdorffOperator::zero for the zero operator")]
    EmptyOperator,

    #[error("family is not closed under inversion: inverse of member {0} is missing")]
    NotClosed(usize),

    #[error("frequency {frequency} aliases on a grid of size {grid} (need |n| < {half})", half = grid / 2)]
    Aliasing { frequency: i64, grid: usize },

    #[error("grid size {0} must be a power of two >= 2")]
    InvalidGrid(usize),

    #[error("exponent p = {0} is not in [1, inf]")]
    InvalidP(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("spectrum is not conjugate-symmetric at {character} (deviation {deviation:e})")]
    NotReal { character: String, deviation: f64 },

    #[error("spectrum is not analytic: {0} lies in the negative cone")]
    NotAnalytic(String),

    #[error("torus point angle {0} is not in [0, 1)")]
    InvalidPoint(f64),

    #[error("integer overflow while {0}")]
    Overflow(String),

    #[error("integer {value} is out of range (limit {limit})")]
    OutOfRange { value: String, limit: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
