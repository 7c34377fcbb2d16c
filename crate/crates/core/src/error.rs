//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A bracketing or iterative root search failed to locate a sign change.
    #[error("no sign change found for {op} on [{lo}, {hi}]")]
    NoSignChange { op: &'static str, lo: f64, hi: f64 },

    /// An iterative scheme ran out of its iteration or subdivision budget.
    #[error("{op} failed to converge: {msg}")]
    NonConvergence { op: &'static str, msg: String },

    /// Two sample sets that must share a layout do not.
    #[error("mismatched sample layouts: {msg}")]
    LayoutMismatch { msg: String },

    /// A capacity/measure budget exceeds what is available.
    #[error("capacity {requested} exceeds total measure {available}")]
    CapacityExceeded { requested: f64, available: f64 },

    /// A field that must be nonzero is identically zero.
    #[error("field is identically zero in {0}")]
    ZeroField(&'static str),

    /// The active set of a masked grid is not a single connected component.
    #[error("masked grid is disconnected: {components} components")]
    DisconnectedMask { components: usize },

    /// A cache file failed validation and cannot be trusted.
    #[error("cache error: {0}")]
    Cache(String),

    /// Not enough data points for a requested fit or check.
    #[error("{op} needs at least {needed} points, got {got}")]
    InsufficientData {
        op: &'static str,
        needed: usize,
        got: usize,
    },
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
