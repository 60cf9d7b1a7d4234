use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by parsing, evaluation and the geometric operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error while parsing an expression. `position` is the 1-based
    /// byte offset into the source text.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// An identifier that is neither a coordinate name nor a function.
    #[error("unknown variable {name} in dimension {dim} (position {position})")]
    UnknownVariable {
        name: String,
        dim: usize,
        position: usize,
    },

    /// Evaluation left the domain of a subexpression (ln/sqrt of a negative
    /// number, division by zero, non-integer power of a non-positive base).
    #[error("domain error: {reason} in `{subtree}`")]
    Domain { reason: String, subtree: String },

    /// The metric is not invertible at the given point.
    #[error("singular metric at {point:?}: |det| = {det:e}")]
    SingularMetric { point: Vec<f64>, det: f64 },

    /// Mismatched chart dimensions or array lengths.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Structurally invalid input (manifest contents, empty sample sets, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A point that must lie inside the chart does not.
    #[error("point {point:?} outside chart bounds")]
    OutsideChart { point: Vec<f64> },

    /// Geodesic integration failed at parameter time `t`.
    #[error("integration failed at t = {t}: {source}")]
    Integration {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// A curve too degenerate for the requested comparison.
    #[error("degenerate curve: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
