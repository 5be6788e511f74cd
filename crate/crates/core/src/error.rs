//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the analyticity strip of a cumulant function.
    #[error("domain violation: Re(z) = {re} outside strip [{lo}, {hi}]")]
    Domain { re: f64, lo: f64, hi: f64 },

    /// A model/measure combination violates a structural assumption
    /// (degenerate increment, 2 outside the strip, bad node set, ...).
    #[error("assumption violated: {0}")]
    Assumption(String),

    /// Invalid user-supplied parameter.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A numerical guard tripped (imaginary residue, non-finite value).
    #[error("numerics failure: {0}")]
    Numerics(String),

    /// An iterative solver failed to converge.
    #[error("solver failed: {0}")]
    Solver(String),
}
