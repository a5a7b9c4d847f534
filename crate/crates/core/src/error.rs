//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    /// Body-spec validation failure; `field` is the path of the offending
    /// entry in the document ("linear.b", "psd.Ai[2]", ...).
    #[error("invalid body spec at `{field}`: {message}")]
    InvalidSpec { field: String, message: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The queried point is not strictly inside the named constraint part.
    #[error("point is not strictly inside {what}")]
    InfeasiblePoint { what: &'static str },

    /// A finite-difference stencil left the body.
    #[error("finite-difference step leaves the body; reduce the step")]
    StepTooLarge,

    /// A ray from an interior point never left the body within the probe
    /// threshold; the body is unbounded (or the spec is malformed).
    #[error("ray stayed inside the body out to parameter {0:e}; body looks unbounded")]
    UnboundedBody(f64),

    #[error("projective map undefined: {0}")]
    ProjectiveDomain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("too few samples: got {found}, need at least {need}")]
    TooFewSamples { found: usize, need: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
