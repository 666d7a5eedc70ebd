//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Everything that can go wrong while building models, integrating
/// dynamics, or extracting observables.
#[derive(Debug, Error)]
pub enum Error {
    /// A 1-based site index fell outside the chain.
    #[error("site index {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    /// An operator or vector had an unexpected dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested chain is larger than the dense-solver capacity cap.
    #[error("chain of {n_sites} sites exceeds the dense-solver cap of {cap} sites")]
    CapacityExceeded { n_sites: usize, cap: usize },

    /// A model violated one of its structural constraints (negative rate,
    /// empty chain, non-finite parameter, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The magnetization direction M/|M| is undefined at |M| = 0.
    #[error("magnetization vector has zero magnitude; its direction is undefined")]
    ZeroMagnetization,

    /// A configuration asked for something the requested operation does not
    /// support (e.g. on-site transverse dissipation in the mean-field
    /// equations, or a hysteresis sweep with longitudinal relaxation).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The integrator produced a non-finite state.
    #[error("integration diverged: non-finite state at t = {t}")]
    Diverged { t: f64 },

    /// Steady-state detection hit its time horizon. Carries the last state
    /// so callers can inspect or resume.
    #[error("no steady state reached by t = {t_max} (residual {residual:.3e})")]
    NotConverged {
        t_max: f64,
        residual: f64,
        last: Vec<[f64; 3]>,
    },

    /// A state argument (density matrix or magnetization set) is malformed.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The eigenvector matrix of the superoperator is too ill-conditioned
    /// for the spectral propagator to be trusted; use the time-stepping
    /// solver instead.
    #[error(
        "spectral decomposition unreliable: eigenvector condition estimate {condition:.3e} \
         exceeds the trust threshold; fall back to the time-stepping solver"
    )]
    SpectralUnreliable { condition: f64 },

    /// More (or fewer) than one eigenvalue sits at zero, so no unique
    /// stationary state exists.
    #[error("stationary state not unique: {multiplicity} eigenvalues at zero")]
    DegenerateSteadyState { multiplicity: usize },

    /// The dense eigensolver itself failed.
    #[error("eigendecomposition failed: {0}")]
    Eig(String),

    /// A two-site quantity was requested with both indices equal.
    #[error("site indices must differ: got {0} twice")]
    CoincidentSites(usize),

    /// Two time series that must share a sample grid do not.
    #[error("sample grids do not match: {0}")]
    GridMismatch(String),
}

#[cfg(feature = "lapack")]
impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Eig(e.to_string())
    }
}
