use num_complex::Complex64;
use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Errors split into two families: invalid input (the caller asked for
/// something outside an operation's domain) and numerical failure (a
/// convergence or budget limit was hit). The CLI maps them onto distinct
/// exit codes through [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} is not in the parabolic basin (orbit escaped after {1} iterates)")]
    NotInBasin(Complex64, u64),

    #[error("no convergence after {iterations} iterates: best estimate {best}, residual {residual:.3e}")]
    NoConvergence {
        best: Complex64,
        residual: f64,
        iterations: u64,
    },

    #[error("backward orbit of {0} cannot be continued inside the repelling petal")]
    BackwardOrbit(Complex64),

    #[error("inversion diverged; best iterate {0}")]
    InverseDivergence(Complex64),

    #[error("height {0} out of numerical range ({1:.6}, {2:.6})")]
    HeightOutOfRange(f64, f64, f64),

    #[error("ambiguous fixed-point clustering for delta = {0}")]
    Clustering(Complex64),

    #[error("no transit: orbit escaped after {0} iterates before reaching the repelling annulus")]
    NoTransit(u64),

    #[error("captured: orbit did not reach the repelling annulus within {0} iterates")]
    Captured(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// `true` for convergence and budget failures, `false` for bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_) | Error::HeightOutOfRange(..) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
