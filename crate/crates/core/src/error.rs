//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes surfaced by the library.
///
/// The CLI maps `Config` to exit code 2 and everything else to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid user input: bad config file, bad parameter combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// Array/matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An operator that must be positive definite is not (shift too small,
    /// non-positive pivot in a definite solve, non-positive first eigenvalue).
    #[error("operator not coercive: {0}")]
    NotCoercive(String),

    /// Matrix handed to the pivoted Cholesky is not positive semi-definite.
    #[error("matrix not positive semi-definite: {0}")]
    NotPsd(String),

    /// Basis degenerated to an empty or too-small retained subspace.
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    /// Spectral gap assumption violated: requested eigenvalue bracket is empty.
    #[error("gap condition violated: {0}")]
    GapViolation(String),

    /// Iterative kernel failed to converge or produced an inconsistent result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Exit code the CLI should terminate with for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 3,
        }
    }
}
