//! Exact symbolic engine for the quantum affine superalgebra
//! `U_q[gl(N|N)^]` in its all-odd simple-root system.
//!
//! The crate builds the root/weight data, the 2N-dimensional level-zero
//! evaluation modules in both Chevalley and loop-generator form, the
//! level-one free-boson realization of the currents, and the bosonized
//! vertex-operator components; each defining relation is then verified
//! mechanically — as an exact matrix identity over Laurent rings for the
//! evaluation modules, and mode-by-mode on truncated Fock modules for the
//! level-one construction.

pub mod coeff;
pub mod evalrep;
pub mod fock;
pub mod graded;
pub mod levelone;
pub mod report;
pub mod rootdata;
pub mod runner;
pub mod vertexops;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("phase denominator {denom} does not divide 2N = {two_n}")]
    PhaseDenominator { denom: i64, two_n: i64 },
    #[error("parse error: {message}")]
    Parse { message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not parity-homogeneous")]
    Inhomogeneous,
    #[error("rank must be positive")]
    ZeroRank,
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("momentum vector has length {got}, expected {want}")]
    BadSector { got: usize, want: usize },
    #[error("sector denominator {denom} does not divide 2N = {two_n}")]
    SectorDenominator { denom: i64, two_n: i64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("truncation cap exceeded during operator application")]
    TruncationHit,
    #[error("unknown relation id `{0}`")]
    UnknownRelation(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
