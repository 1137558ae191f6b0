//! Time evolution of the effective equation
//! `i dPsi/dt = -lap Psi / (2 eps' m) + (V - i L/2) Psi`, `L = Gamma + m eps''/eps'`.

pub mod analytic;
mod implicit;
mod modes;
mod propagator;
mod stream;

pub use implicit::{implicit_reference_propagate, CrankNicolson};
pub use modes::{evanescent_wavevector, leaky_wavevector, stationary_mode, ModeKind, StepSolution};
pub use propagator::{
    pauli_propagate, propagate, propagate_snapshots, split_step_propagate, Snapshot, SplitStep,
};
pub use stream::{
    spinor_from_stream, stream_propagate, transversality_residual, StreamFunction, StreamSpinor,
    TransversalityResidual,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{RealField, C64};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;

/// Real potential plus the uniform amplitude loss rate `L/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPotential {
    pub v_real: RealField,
    pub loss_rate: f64,
}

impl ComplexPotential {
    pub fn new(v_real: RealField, loss_rate: f64) -> Result<Self> {
        if !(loss_rate.is_finite() && loss_rate >= 0.0) {
            return Err(Error::config(format!("loss rate must be >= 0, got {loss_rate}")));
        }
        Ok(Self { v_real, loss_rate })
    }

    pub fn from_medium(v_real: RealField, medium: &CavityMedium) -> Self {
        Self { v_real, loss_rate: medium.amplitude_loss_rate() }
    }

    pub fn flat(grid: &Grid2D, medium: &CavityMedium) -> Self {
        Self::from_medium(RealField::zeros(*grid), medium)
    }

    pub fn grid(&self) -> &Grid2D {
        self.v_real.grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.v_real.values().iter().fold(0.0f64, |m, v| m.max(v.hypot(self.loss_rate)))
    }

    pub fn value(&self, idx: usize) -> C64 {
        C64::new(self.v_real.values()[idx], -self.loss_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    SplitStepSpectral,
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Periodic,
    /// Imaginary potential `-i strength s^2` ramping in over `width` from each edge.
    Sponge { width: f64, strength: f64 },
}

impl Boundary {
    /// Absorption rate at a point, zero outside the sponge layer.
    pub fn absorption(&self, grid: &Grid2D, idx: usize) -> f64 {
        match *self {
            Boundary::Periodic => 0.0,
            Boundary::Sponge { width, strength } => {
                let (x, y) = grid.coords(idx);
                let dist = (0.5 * grid.lx() - x.abs()).min(0.5 * grid.ly() - y.abs());
                if dist >= width {
                    0.0
                } else {
                    let s = (width - dist) / width;
                    strength * s * s
                }
            }
        }
    }

    /// True for points outside the sponge layer, which audits may use.
    pub fn interior_mask(&self, grid: &Grid2D) -> Vec<bool> {
        (0..grid.len()).map(|i| self.absorption(grid, i) == 0.0).collect()
    }

    fn max_absorption(&self) -> f64 {
        match *self {
            Boundary::Periodic => 0.0,
            Boundary::Sponge { strength, .. } => strength,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub boundary: Boundary,
    /// Upper bound on `dt * max|V - i L/2|`.
    pub stability_limit: f64,
    /// Iteration cap for the implicit solve.
    pub max_iterations: usize,
    /// Relative residual target for the implicit solve.
    pub tolerance: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            scheme: Scheme::SplitStepSpectral,
            boundary: Boundary::Periodic,
            stability_limit: 0.1,
            max_iterations: 1000,
            tolerance: 1e-10,
        }
    }
}

impl PropagatorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt, ..Self::default() }
    }

    pub fn validate(&self, pot: &ComplexPotential) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt)));
        }
        let grid = pot.grid();
        if let Boundary::Sponge { width, strength } = self.boundary {
            if !(width > 0.0 && width < 0.25 * grid.lx().min(grid.ly())) {
                return Err(Error::config(format!("sponge width {width} must lie in (0, min(Lx, Ly)/4)")));
            }
            if !(strength.is_finite() && strength >= 0.0) {
                return Err(Error::config("sponge strength must be >= 0"));
            }
        }
        let vmax = pot.max_abs() + self.boundary.max_absorption();
        if self.dt * vmax > self.stability_limit {
            return Err(Error::config(format!(
                "dt * max|V| = {:.3e} exceeds {}",
                self.dt * vmax,
                self.stability_limit
            )));
        }
        Ok(())
    }
}
