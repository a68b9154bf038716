use crate::measurement::Inversion;

/// Errors surfaced by the kernel quadratures, characteristic-function
/// evaluation and the closed-form observables.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the physical domain (negative width,
    /// non-positive frequency, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation needs a frequency-resolved response, which
    /// the bath variant does not provide.
    #[error("unsupported bath: {0}")]
    UnsupportedBath(String),

    /// The adaptive quadrature exhausted its panel budget before reaching
    /// the requested tolerance. `partial` is the best available estimate.
    #[error("quadrature did not converge: achieved {achieved:.3e} of requested {requested:.3e}; partial estimate {partial:.9e}")]
    Convergence {
        partial: f64,
        achieved: f64,
        requested: f64,
    },

    /// Covariance inputs that do not describe a valid joint Gaussian
    /// (correlation magnitude reaching or exceeding one).
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    /// Characteristic samples do not decay at the grid boundary, so the
    /// discrete inversion wraps around. The aliased result is still
    /// carried along for inspection.
    #[error("characteristic function does not decay at the grid boundary (max |xi| = {max_boundary:.3e}); inversion is aliased")]
    Aliasing {
        max_boundary: f64,
        partial: Inversion,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
