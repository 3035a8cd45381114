use thiserror::Error;

use crate::table::LatticeVar;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // cartan
    #[error("not a generalized Cartan matrix: {0}")]
    NotGeneralizedCartan(String),
    #[error("matrix is not symmetrizable: {0}")]
    NotSymmetrizable(String),
    #[error("matrix is not tamely laced")]
    NotTamelyLaced,
    #[error("matrix is not simply laced")]
    NotSimplyLaced,
    #[error("matrix is already bipartite")]
    AlreadyBipartite,
    #[error("matrix is not bipartite")]
    NotBipartite,
    #[error("Dynkin diagram is disconnected")]
    Disconnected,

    // exactmath
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("denominator vanishes at the given assignment")]
    EvalDivisionByZero,
    #[error("assignment does not cover generator {0}")]
    IncompleteAssignment(usize),

    // systems
    #[error("level {m} out of range for node {a}")]
    LevelOutOfRange { a: usize, m: i64 },
    #[error("empty window")]
    EmptyWindow,
    #[error("missing value for {0}")]
    MissingValue(LatticeVar),
    #[error("zero divisor while solving for {0}")]
    ZeroDivisor(LatticeVar),
    #[error("unschedulable dependency: {target} needs {blocking}")]
    UnschedulableDependency { target: LatticeVar, blocking: LatticeVar },
    #[error("window too narrow: {0} is not available")]
    WindowTooNarrow(LatticeVar),
    #[error("restricted systems have no Y-to-T reconstruction")]
    RestrictedReconstruction,

    // cluster
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("matrix is not skew-symmetrizable: {0}")]
    NotSkewSymmetrizable(String),
    #[error("exchange matrix has no parity split")]
    NoParity,
    #[error("exchange matrix violates the bipartite belt conditions: {0}")]
    ConditionsViolated(String),
    #[error("missing cluster entry ({}, {})", .0 + 1, .1)]
    MissingEntry(usize, i64),

    // io
    #[error("parse error: {0}")]
    Parse(String),
}
