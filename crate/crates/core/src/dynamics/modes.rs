use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexScalarField, C64, I};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModeKind {
    /// `exp(i (kx x + ky y))`.
    PlaneWave { kx: f64, ky: f64 },
    /// Leaky wave along +x at energy `E > 0` above the cavity cutoff.
    LeakyPlaneWave { energy: f64 },
    /// Below-cutoff wave at detuning `Delta < 0`.
    Evanescent { detuning: f64 },
    /// Wave of energy `energy` incident from `x < x0` on a step of height `step_height`.
    WaveguideStep { energy: f64, step_height: f64, x0: f64 },
}

/// First-order leaky wavevector
/// `kx = sqrt(2 m eps' E) + i m eps' L / (2 sqrt(2 m eps' E))`.
pub fn leaky_wavevector(energy: f64, medium: &CavityMedium) -> Result<C64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::WrongBranch(format!("leaky wave needs E > 0, got {energy}")));
    }
    let mk = medium.kinetic_mass();
    let k0 = (2.0 * mk * energy).sqrt();
    Ok(C64::new(k0, mk * medium.loss_rate() / (2.0 * k0)))
}

/// `(kappa, beta)` with `kappa = sqrt(2 m eps' |Delta|)` and
/// `beta = m eps' L / (2 kappa)`, the continuation of the leaky wavevector to
/// `Delta < 0`.
pub fn evanescent_wavevector(detuning: f64, medium: &CavityMedium) -> Result<(f64, f64)> {
    if detuning == 0.0 {
        return Err(Error::Degenerate("zero detuning has no evanescent decay".into()));
    }
    if !(detuning.is_finite() && detuning < 0.0) {
        return Err(Error::WrongBranch(format!("evanescent wave needs Delta < 0, got {detuning}")));
    }
    let mk = medium.kinetic_mass();
    let kappa = (2.0 * mk * detuning.abs()).sqrt();
    Ok((kappa, mk * medium.loss_rate() / (2.0 * kappa)))
}

/// Matched solution across a potential step at `x0`:
/// `e^{ik1(x-x0)} + r e^{-ik1(x-x0)}` on the left, `t e^{ik2(x-x0)}` on the right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSolution {
    pub k1: C64,
    pub k2: C64,
    pub r: C64,
    pub t: C64,
    pub x0: f64,
}

impl StepSolution {
    pub fn new(energy: f64, step_height: f64, x0: f64, medium: &CavityMedium) -> Result<Self> {
        let mk = medium.kinetic_mass();
        let half_loss = medium.amplitude_loss_rate();
        // principal root keeps Im k >= 0
        let k = |v: f64| (2.0 * mk * C64::new(energy - v, half_loss)).sqrt();
        let (k1, k2) = (k(0.0), k(step_height));
        let sum = k1 + k2;
        if sum.norm() == 0.0 {
            return Err(Error::Degenerate("step matching at zero wavevector".into()));
        }
        Ok(Self { k1, k2, r: (k1 - k2) / sum, t: 2.0 * k1 / sum, x0 })
    }

    pub fn value(&self, x: f64) -> C64 {
        let s = x - self.x0;
        if s < 0.0 {
            (I * self.k1 * s).exp() + self.r * (-I * self.k1 * s).exp()
        } else {
            self.t * (I * self.k2 * s).exp()
        }
    }

    pub fn derivative(&self, x: f64) -> C64 {
        let s = x - self.x0;
        if s < 0.0 {
            I * self.k1 * ((I * self.k1 * s).exp() - self.r * (-I * self.k1 * s).exp())
        } else {
            I * self.k2 * self.t * (I * self.k2 * s).exp()
        }
    }
}

pub fn stationary_mode(kind: &ModeKind, grid: &Grid2D, medium: &CavityMedium) -> Result<ComplexScalarField> {
    let field = match *kind {
        ModeKind::PlaneWave { kx, ky } => ComplexScalarField::from_fn(*grid, |x, y| (I * (kx * x + ky * y)).exp()),
        ModeKind::LeakyPlaneWave { energy } => {
            let k = leaky_wavevector(energy, medium)?;
            ComplexScalarField::from_fn(*grid, |x, _| (I * k * x).exp())
        }
        ModeKind::Evanescent { detuning } => {
            let (kappa, beta) = evanescent_wavevector(detuning, medium)?;
            ComplexScalarField::from_fn(*grid, |x, _| C64::from_polar((-kappa * x).exp(), beta * x))
        }
        ModeKind::WaveguideStep { energy, step_height, x0 } => {
            let s = StepSolution::new(energy, step_height, x0, medium)?;
            ComplexScalarField::from_fn(*grid, |x, _| s.value(x))
        }
    };
    Ok(field)
}
