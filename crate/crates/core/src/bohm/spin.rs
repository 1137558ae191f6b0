use crate::field::SpinorField;
use crate::grid::Grid2D;

use super::density_mask;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinDensityField {
    grid: Grid2D,
    pub sigma_z: Vec<f64>,
    pub mask: Vec<bool>,
}

impl SpinDensityField {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn max_abs(&self) -> f64 {
        self.sigma_z
            .iter()
            .zip(&self.mask)
            .filter(|(_, &m)| m)
            .fold(0.0f64, |a, (s, _)| a.max(s.abs()))
    }
}

/// `Sigma_z = (|Psi_+|^2 - |Psi_-|^2) / (2 (|Psi_+|^2 + |Psi_-|^2))`; zero on masked points.
pub fn spin_density(spinor: &SpinorField) -> SpinDensityField {
    let circ = spinor.to_circular();
    let (p, m) = circ.components();
    let density = circ.density();
    let mask = density_mask(&density);
    let sigma_z = p
        .values()
        .iter()
        .zip(m.values())
        .zip(density.iter().zip(&mask))
        .map(|((a, b), (&rho, &ok))| if ok { 0.5 * (a.norm_sqr() - b.norm_sqr()) / rho } else { 0.0 })
        .collect();
    SpinDensityField { grid: *spinor.grid(), sigma_z, mask }
}
