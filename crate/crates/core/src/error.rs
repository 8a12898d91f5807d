use thiserror::Error;

use crate::heightgraph::LevelReport;

/// Errors reported by the analyses in this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The substitution (or its incidence matrix) is not primitive.
    #[error("substitution is not primitive")]
    Primitivity,

    /// The substitution is neither left- nor right-proper and not of constant length.
    #[error(
        "substitution must be left-proper or right-proper (or of constant length); \
         convert it to a proper substitution first"
    )]
    ProperRequired,

    /// The generated subshift is periodic, so the non-periodic algorithms do not apply.
    #[error("fixed point is periodic with minimal period {period}; use the periodicity analysis")]
    PeriodicInput { period: u64 },

    /// A morphism that was expected to be letter-to-letter is not.
    #[error("morphism is not a coding: {0}")]
    NotCoding(String),

    /// Residue enumeration exceeded its configured budget.
    #[error("residue budget of {budget} exceeded at level {level}")]
    Budget {
        budget: u64,
        level: u32,
        partial: Vec<LevelReport>,
    },

    /// A guarantee that should hold by construction failed.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
