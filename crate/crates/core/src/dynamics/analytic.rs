//! Closed-form solutions used as propagator oracles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::field::{ComplexScalarField, RealField, C64, I};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;

/// `exp(-|r - r0|^2 / (2 sigma^2) + i k.(r - r0))` at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianPacket {
    pub x0: f64,
    pub y0: f64,
    pub sigma: f64,
    pub kx: f64,
    pub ky: f64,
}

impl GaussianPacket {
    /// Exact free evolution in a flat lossy cavity.
    pub fn free(&self, grid: &Grid2D, medium: &CavityMedium, t: f64) -> ComplexScalarField {
        let mu = medium.kinetic_mass();
        let a = C64::new(1.0, t / (mu * self.sigma * self.sigma));
        let decay = (-medium.amplitude_loss_rate() * t).exp();
        let axis = |x: f64, x0: f64, k: f64| {
            let u = x - x0 - k * t / mu;
            (-u * u / (2.0 * self.sigma * self.sigma * a) + I * (k * (x - x0) - 0.5 * k * k * t / mu)).exp() / a.sqrt()
        };
        ComplexScalarField::from_fn(*grid, |x, y| decay * axis(x, self.x0, self.kx) * axis(y, self.y0, self.ky))
    }
}

/// Isotropic trap `V = mu w^2 r^2 / 2`, `mu = eps' m`.
pub fn harmonic_potential(grid: &Grid2D, medium: &CavityMedium, omega: f64) -> RealField {
    let mu = medium.kinetic_mass();
    RealField::from_fn(*grid, |x, y| 0.5 * mu * omega * omega * (x * x + y * y))
}

/// Coherent state of [`harmonic_potential`] displaced by `x0` along x,
/// ground state along y.
pub fn coherent_state(grid: &Grid2D, medium: &CavityMedium, omega: f64, x0: f64, t: f64) -> ComplexScalarField {
    let mu = medium.kinetic_mass();
    let s = mu * omega;
    let norm = (s / PI).sqrt();
    let (xc, pc) = (x0 * (omega * t).cos(), -s * x0 * (omega * t).sin());
    let decay = (-medium.amplitude_loss_rate() * t).exp();
    ComplexScalarField::from_fn(*grid, |x, y| {
        let d = x - xc;
        norm * decay * (-0.5 * s * (d * d + y * y) + I * (pc * (x - 0.5 * xc) - omega * t)).exp()
    })
}
