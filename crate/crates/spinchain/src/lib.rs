//! Dynamics of open spin-1/2 chains with a shared boson environment.
//!
//! The crate provides two complementary solvers for the same family of
//! models — a linear chain of spin-1/2 sites with anisotropic
//! nearest-neighbour exchange, a uniform external field, local (on-site)
//! dissipation channels, and dissipative hopping between adjacent sites:
//!
//! * an **exact** density-matrix treatment ([`lindblad`], [`spectral`]):
//!   the full master equation in Lindblad form is vectorized into a dense
//!   superoperator and propagated either by fixed-step Runge–Kutta
//!   integration or through its eigendecomposition, which also yields the
//!   stationary state directly;
//! * a **mean-field** reduction ([`meanfield`]): the factorized-state
//!   approximation closes the dynamics over one magnetization vector per
//!   site (or a single collective vector), producing a generalized
//!   Landau–Lifshitz equation with anisotropy-driven precession,
//!   transverse damping, and longitudinal relaxation, including
//!   quasi-static hysteresis sweeps of the longitudinal field.
//!
//! [`observables`] extracts the quantities used to compare the two:
//! site-resolved and averaged magnetization, two-point correlation
//! functions, Wootters concurrence, and the squared deviation between
//! magnetization trajectories.
//!
//! Units are natural throughout: ħ = 1, unit gyromagnetic ratio, spin
//! operators are σ/2, and the magnetization is normalized so |M(0)| ≤ 1.
//! The canonical basis orders |↑⟩ before |↓⟩ and site 1 is the leftmost
//! tensor factor.

pub mod error;
pub mod lindblad;
pub mod meanfield;
pub mod model;
pub mod observables;
pub mod spin;

#[cfg(feature = "lapack")]
pub mod spectral;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
