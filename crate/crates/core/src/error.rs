use thiserror::Error;

use crate::Vertex;

/// Errors raised by constructors, builders and loaders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{n} is not an odd prime: divisible by {divisor}")]
    NotPrime { n: u64, divisor: u64 },

    #[error("{n} is not an odd prime")]
    NotOddPrime { n: u64 },

    #[error("element {a} is outside the field of order {p}")]
    OutOfField { a: u64, p: u64 },

    #[error("prime {p} is not admissible: {reason}")]
    NotAdmissible { p: u64, reason: String },

    #[error("asymmetric residue relation: {p} is congruent to 3 mod 4")]
    AsymmetricResidues { p: u64 },

    #[error("duplicate point {0}")]
    DuplicatePoint(u64),

    #[error("expected between 1 and {max} points, got {got}")]
    PointCount { got: usize, max: usize },

    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),

    #[error("vertices must be pairwise distinct, got {0:?}")]
    CoincidentVertices(Vec<Vertex>),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("invalid path {path:?}: {reason}")]
    InvalidPath { path: Vec<Vertex>, reason: String },

    #[error("pair {{{0},{1}}} has no path")]
    MissingPair(Vertex, Vertex),

    #[error("pair {{{0},{1}}} has more than one path")]
    DuplicatePair(Vertex, Vertex),

    #[error("path system is not consistent: {0}")]
    Inconsistent(String),

    #[error("path {{{u},{v}}} leaves the vertex set through {escapee}")]
    PathEscapes { u: Vertex, v: Vertex, escapee: Vertex },

    #[error("empty vertex set")]
    EmptySet,

    #[error("vertex sets overlap at {0}")]
    Overlap(Vertex),

    #[error("path system is not labelled by a prime field: {0}")]
    NotFieldLabelled(String),

    #[error("malformed linear system: {0}")]
    MalformedSystem(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coefficient {coefficient} of inequality {index} is below 2")]
    CoefficientBelowTwo { index: usize, coefficient: String },

    #[error("{0} is not in the reduced residue set")]
    NotInReducedSet(u64),

    #[error("need at least two vertices, got {0}")]
    TooFewVertices(usize),

    #[error("search budget of {budget} branches exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
