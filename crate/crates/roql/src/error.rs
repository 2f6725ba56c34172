//! Error type shared by all modules.

use crate::oracle::QueryKind;
use crate::truth::VarIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("arity {n} exceeds the configured cap {cap}")]
    ArityTooLarge { n: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("variable {0} appears more than once")]
    RepeatedVariable(VarIndex),

    #[error("gate `{0}` is not in the basis")]
    GateNotInBasis(String),

    #[error("query kind {0:?} is not allowed in this session")]
    DisallowedQuery(QueryKind),

    #[error("equivalence hypothesis is not read-once over the session basis")]
    ImproperEquivalence,

    #[error("projection is constant; nothing to bisect")]
    BisectConstant,

    #[error("no checking test: function is not {l}-satisfiable")]
    NoCheckingTest { l: usize },

    #[error("no essentiality square exists for variables {i}, {j}")]
    NoSquare { i: VarIndex, j: VarIndex },

    #[error("graph is not a cograph")]
    NotCograph,

    #[error("tree is a constant or a single literal and has no glueing")]
    NoGlueing,

    #[error("inconsistent essentiality-square data: {0}")]
    InconsistentSquares(String),

    #[error("promise violation: {0}")]
    PromiseViolation(String),

    #[error("checking test is inconsistent with the reference function")]
    InconsistentTest,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
