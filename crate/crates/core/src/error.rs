use thiserror::Error;

/// Errors raised by the numerical layer and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid alignment: {0}")]
    GridAlignment(String),

    #[error("contraction violated: estimated input-output norm {estimate} >= 1")]
    ContractionViolation { estimate: f64 },

    #[error("Neumann series did not converge after {terms} terms (last term norm {last_term_norm})")]
    NoConvergence {
        terms: usize,
        last_term_norm: f64,
        term_norms: Vec<f64>,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("singular matrix")]
    Singular,

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Whether the failure stems from invalid input rather than from the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_) | Error::Domain(_) | Error::GridAlignment(_) | Error::Config(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
