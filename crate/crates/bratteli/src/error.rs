//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by diagram, presentation, realization, and tower operations.
///
/// Diagnostics that are part of an operation's normal output (validation
/// reports, three-valued findings) are not errors; this type covers refused
/// preconditions, malformed inputs, and budget overruns.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level {level}: {message}")]
    InvalidDiagram { level: usize, message: String },

    #[error("level index {index} is outside the represented depth {depth} and no periodic tail is declared")]
    DepthExceeded { index: usize, depth: usize },

    #[error("keep list must be strictly increasing and nonempty")]
    BadKeepList,

    #[error("set is not hereditary: vertex {vertex} at level {level} has an edge leaving the set")]
    NotHereditary { level: usize, vertex: String },

    #[error("set is not saturated: vertex {vertex} at level {level} sends every edge into the set")]
    NotSaturated { level: usize, vertex: String },

    #[error("quotient by the full vertex set is empty")]
    EmptyQuotient,

    #[error("enumeration limit {limit} exceeded ({candidates} candidates); use periodic-tail analysis or raise the limit")]
    EnumerationLimit { limit: usize, candidates: usize },

    #[error("operation refused: {reason}")]
    Refused { reason: String },

    #[error("{op} could not reach its target within depth {depth}; blocking vertices: {witness}")]
    UnknownAtDepth {
        op: &'static str,
        depth: usize,
        witness: String,
    },

    #[error("vertex {vertex} violates the realization hypotheses: {message}")]
    ConditionViolated { vertex: String, message: String },

    #[error("injection table invalid: {0}")]
    BadInjection(String),

    #[error("graph has a sink at {0}; the edge-matrix conversion needs a graph with no sinks")]
    SinkPresent(String),

    #[error("vertex {0} emits infinitely many edges; operation needs a row-finite input")]
    InfiniteEmitter(String),

    #[error("matrix row {0} is not finite; operation needs a row-finite matrix")]
    RowNotFinite(String),

    #[error("matrix row {0} is identically zero")]
    ZeroRow(String),

    #[error("ultraedge {edge} has an unresolved range at the requested depth")]
    UnresolvedRange { edge: String },

    #[error("source map is not bijective: {0}")]
    SourceNotBijective(String),

    #[error("vertex {vertex} connects to infinitely many sinks")]
    InfinitelyManySinks { vertex: String },

    #[error("cycle found through {0}; the presentation is not an AF presentation")]
    CyclePresent(String),

    #[error("delta value {delta} at vertex {vertex} is too large to materialize")]
    DeltaTooLarge { vertex: String, delta: String },

    #[error("dimension cap {cap} exceeded: total dimension {total}")]
    NumericCapExceeded { cap: u64, total: String },

    #[error("inconsistent amalgamation ranks: {0}")]
    BadAmalgamation(String),

    #[error("descriptor is inconsistent: {0}")]
    InconsistentDescriptor(String),

    #[error("classification conflict on {class}: rules {a} and {b} disagree")]
    RuleConflict {
        class: &'static str,
        a: String,
        b: String,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub fn other(msg: impl Into<String>) -> Self {
        Error::Other(msg.into())
    }

    /// True for the three-valued "could not decide within budget" outcomes,
    /// which the CLI maps to its own exit code.
    pub fn is_unknown_at_depth(&self) -> bool {
        matches!(
            self,
            Error::UnknownAtDepth { .. } | Error::UnresolvedRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
