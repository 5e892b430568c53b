use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input failed validation. `field` is a dotted path into the offending
    /// configuration value (e.g. `wire.d`).
    #[error("invalid input at `{field}`: {message}")]
    InvalidInput { field: String, message: String },

    #[error("eigensolver failed to converge after {sweeps} sweeps (matrix {fingerprint})")]
    EigenNonConvergence { fingerprint: String, sweeps: usize },

    #[error("energy cutoff {cutoff} lies below the ground energy {ground}")]
    EmptySpectrum { cutoff: f64, ground: f64 },

    #[error("mesh h = {h} cannot resolve the requested problem: {message}")]
    MeshSizing { h: f64, message: String },

    #[error("Bose occupation undefined for E <= mu (E = {energy}, mu = {mu})")]
    OccupationDomain { energy: f64, mu: f64 },

    #[error("chemical potential {mu} exceeds the continuum ground energy {e0}")]
    RhoExcDomain { mu: f64, e0: f64 },

    #[error("bracket expansion failed in {context}: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    BracketFailure {
        context: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{context} did not reach tolerance: bracket [{lo}, {hi}], residual {residual}")]
    SolverFailure {
        context: &'static str,
        lo: f64,
        hi: f64,
        residual: f64,
    },

    #[error("sweep solve failed at L = {length}: {source}")]
    SweepPoint {
        length: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Dotted config path of the offending field, when this is a validation error.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::InvalidInput { field, .. } => Some(field),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
