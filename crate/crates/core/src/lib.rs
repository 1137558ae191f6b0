//! Effective Schrodinger/Pauli dynamics for lossy planar microcavities,
//! de Broglie-Bohm kinematics of the in-plane photon fluid, reconstruction of
//! the 3D Maxwell fields with their energy flow, and the leaky-wave and
//! imaging formulas of the open cavity.
//!
//! Natural units with hbar = c = 1 are used throughout; [`leaky::si`] holds
//! the only conversion to SI.

pub mod bohm;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod field;
pub mod grid;
pub mod leaky;
pub mod maxwell;
pub mod medium;
pub mod potential;
pub mod spectral;
pub mod warning;

pub use error::{Error, Result};
pub use field::{ComplexScalarField, RealField, SpinorBasis, SpinorField, C64, I};
pub use grid::{make_grid, Grid2D};
pub use medium::{effective_mass, CavityMedium};
pub use potential::{eval_potential, PotentialSpec};
pub use spectral::DerivativeMethod;
pub use warning::{GuardConfig, Warning};
