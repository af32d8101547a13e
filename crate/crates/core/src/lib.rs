//! Exact spectral solver for the two-dimensional ghost oscillator
//!
//!   H = p_x² − p_y² + ν²x² + Ωy² + gxy
//!
//! The eigensystem is computed by two independent routes and cross-validated:
//!
//! - coupled three-term recurrence relations on a polynomial-times-Gaussian
//!   Ansatz (quasi-exactly-solvable structure, tridiagonal determinants and
//!   closed tridiagonal inverses), and
//! - a bosonic Fock-space construction on top of the symplectic map to the
//!   Pais-Uhlenbeck oscillator.
//!
//! Observables (densities, uncertainty products, classical trajectories) are
//! evaluated analytically from bivariate Gaussian moments; no quadrature or
//! ODE integration appears in the production path.

pub mod error;
pub mod fock;
pub mod params;
pub mod pu_map;
pub mod recurrence;
pub mod wavefunction;

pub use error::CoreError;
pub use fock::{FockLevel, LadderKind, LadderOp};
pub use params::{AuxParams, Branch, DomainReport, ModelParams, Sign};
pub use pu_map::{ModeAmplitudes, PUParams, PhaseState, Regime};
pub use recurrence::{CoefficientTable, LevelSign, SpectrumLevel, Tridiag};
pub use wavefunction::{Axis, PolyGauss, Window};

pub type Result<T> = std::result::Result<T, CoreError>;
