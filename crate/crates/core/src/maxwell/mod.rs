//! Reconstruction of the 3D cavity field from the in-plane wavefunction and
//! the energy-flow bookkeeping built on it.
//!
//! `E = (Psi_x, Psi_y, E_z) e^{-imt} sin(chi)`, `chi = sqrt(eps') (m + V - i Gamma/2) z`,
//! `B = curl(E) / (i m)`. The optional longitudinal part
//! `E_z = div(Psi) cos(chi) / kappa` makes the field divergence free.

mod audit;
mod berry;
mod energy;
mod fields;

pub use audit::{conservation_audit, equivalence_audit, AuditOptions, ConservationReport, EquivalencePoint, EquivalenceReport};
pub use berry::{berry_decompose, BerryDecomposition};
pub use energy::{poynting_energy, z_average_fields, z_average_velocity, EnergyFields3D, EnergyPoint, ZAveragedVelocity};
pub use fields::{reconstruct_fields, FieldPoint, FieldSlice, Fields3D, ReconstructionOptions};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexScalarField, SpinorField};
use crate::medium::CavityMedium;

/// Uniform samples `z_k = k D0 / (nz - 1)` covering both mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    nz: usize,
    d0: f64,
}

impl ZGrid {
    pub fn new(nz: usize, d0: f64) -> Result<Self> {
        if nz < 2 || !(d0.is_finite() && d0 > 0.0) {
            return Err(Error::config(format!("z grid needs nz >= 2 and D0 > 0, got {nz}, {d0}")));
        }
        Ok(Self { nz, d0 })
    }

    /// `per_q * q` samples; the mode profile needs at least `16 q`.
    pub fn for_medium(medium: &CavityMedium, per_q: usize) -> Result<Self> {
        let g = Self::new(per_q * medium.q as usize, medium.d0)?;
        g.check_resolution(medium)?;
        Ok(g)
    }

    pub fn check_resolution(&self, medium: &CavityMedium) -> Result<()> {
        let need = 16 * medium.q as usize;
        if self.nz < need {
            return Err(Error::config(format!("nz = {} under-resolves mode order {} (need >= {need})", self.nz, medium.q)));
        }
        Ok(())
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn dz(&self) -> f64 {
        self.d0 / (self.nz - 1) as f64
    }

    pub fn z(&self, k: usize) -> f64 {
        k as f64 * self.dz()
    }

    pub fn zs(&self) -> Vec<f64> {
        (0..self.nz).map(|k| self.z(k)).collect()
    }

    /// Trapezoid weight of sample `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.nz {
            0.5 * self.dz()
        } else {
            self.dz()
        }
    }
}

/// In-plane polarisation content of the cavity field.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarSource {
    /// `E_perp = e_hat Psi` with a real unit vector `e_hat = (ex, ey)`.
    Scalar { psi: ComplexScalarField, ex: f64, ey: f64 },
    /// `E_perp = Psi_+ e_+ + Psi_- e_-`.
    Spinor(SpinorField),
}

impl PlanarSource {
    /// Scalar source polarised along y, transverse to flow along x.
    pub fn scalar_y(psi: ComplexScalarField) -> Self {
        PlanarSource::Scalar { psi, ex: 0.0, ey: 1.0 }
    }

    pub fn scalar(psi: ComplexScalarField, ex: f64, ey: f64) -> Result<Self> {
        let n = ex.hypot(ey);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::config("polarisation vector must be non-zero"));
        }
        Ok(PlanarSource::Scalar { psi, ex: ex / n, ey: ey / n })
    }

    pub fn grid(&self) -> &crate::grid::Grid2D {
        match self {
            PlanarSource::Scalar { psi, .. } => psi.grid(),
            PlanarSource::Spinor(s) => s.grid(),
        }
    }

    /// Cartesian pair `(Psi_x, Psi_y)`.
    pub fn cartesian(&self) -> (ComplexScalarField, ComplexScalarField) {
        match self {
            PlanarSource::Scalar { psi, ex, ey } => (psi.scaled((*ex).into()), psi.scaled((*ey).into())),
            PlanarSource::Spinor(s) => s.to_cartesian().into_components(),
        }
    }
}
