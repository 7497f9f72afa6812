use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller supplied data outside an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Field carries energy in the top octave of the lattice, where products alias.
    #[error("aliasing guard: relative top-octave energy {0:.3e}")]
    Aliasing(f64),
    /// A fit or statistic was requested with too few samples.
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    /// A numerical procedure left its regime (divergence, singular Jacobian, instability).
    #[error("numerical abort: {0}")]
    Abort(String),
}

pub type Result<T> = std::result::Result<T, Error>;
