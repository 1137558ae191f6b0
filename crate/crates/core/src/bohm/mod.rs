//! de Broglie-Bohm kinematics of the in-plane photon fluid.

mod jumps;
mod master;
mod spin;
mod trajectory;
mod velocity;

pub use jumps::{bell_jump_ensemble, interrupt_trajectory, wilson_interval, JumpEvent, JumpProcess, SurvivalCurve};
pub use master::{continuity_residual, master_equation_rates, ContinuityResidual, MasterRates};
pub use spin::{spin_density, SpinDensityField};
pub use trajectory::{
    integrate_trajectory, FnVelocity, SnapshotVelocity, Termination, Trajectory, TrajectorySample,
    UniformVelocity, VelocityProvider,
};
pub use velocity::{pauli_velocity, scalar_velocity, PauliVelocity, VelocityField2D};

/// Points with `|Psi|^2 < DENSITY_FLOOR * max|Psi|^2` are masked.
pub const DENSITY_FLOOR: f64 = 1e-12;

pub fn density_mask(density: &[f64]) -> Vec<bool> {
    let max = density.iter().cloned().fold(0.0f64, f64::max);
    let floor = DENSITY_FLOOR * max;
    density.iter().map(|&d| max > 0.0 && d >= floor && d > 0.0).collect()
}
