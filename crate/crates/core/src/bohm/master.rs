use crate::error::{Error, Result};
use crate::field::ComplexScalarField;
use crate::medium::CavityMedium;
use crate::spectral::{DerivativeMethod, Differentiator};

/// Jump-rate densities of the master equation. The loss part of the
/// Hamiltonian only removes probability, so the source density vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterRates {
    pub loss: Vec<f64>,
    pub source: Vec<f64>,
}

pub fn master_equation_rates(psi: &ComplexScalarField, medium: &CavityMedium) -> MasterRates {
    let rate = medium.loss_rate();
    MasterRates {
        loss: psi.values().iter().map(|v| rate * v.norm_sqr()).collect(),
        source: vec![0.0; psi.values().len()],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityResidual {
    /// `d rho/dt + div(rho v) + rate rho` per point (zero where excluded).
    pub field: Vec<f64>,
    /// `sqrt(sum r^2 dA)` over included points.
    pub l2: f64,
    pub linf: f64,
    /// `||Psi_1||^2 / ||Psi_0||^2`.
    pub norm_ratio: f64,
    /// `exp(-rate dt)`.
    pub expected_ratio: f64,
}

impl ContinuityResidual {
    pub fn norm_ratio_error(&self) -> f64 {
        (self.norm_ratio / self.expected_ratio - 1.0).abs()
    }
}

/// Discrete continuity residual between two snapshots `dt` apart: forward
/// difference in time, flux divergence and loss averaged over both ends.
pub fn continuity_residual(
    psi0: &ComplexScalarField,
    psi1: &ComplexScalarField,
    dt: f64,
    medium: &CavityMedium,
    method: DerivativeMethod,
    include: Option<&[bool]>,
) -> Result<ContinuityResidual> {
    let grid = *psi0.grid();
    grid.ensure_same(psi1.grid())?;
    if !(dt > 0.0) {
        return Err(Error::config("snapshot spacing must be > 0"));
    }
    let d = Differentiator::new(&grid, method)?;
    let mk = medium.kinetic_mass();
    let rate = medium.loss_rate();
    let div_flux = |psi: &ComplexScalarField| -> Result<Vec<f64>> {
        let (gx, gy) = d.gradient(psi.values())?;
        let jx: Vec<f64> = psi.values().iter().zip(&gx).map(|(p, g)| (p.conj() * g).im / mk).collect();
        let jy: Vec<f64> = psi.values().iter().zip(&gy).map(|(p, g)| (p.conj() * g).im / mk).collect();
        let a = d.dx_real(&jx)?;
        let b = d.dy_real(&jy)?;
        Ok(a.into_iter().zip(b).map(|(u, v)| u + v).collect())
    };
    let (d0, d1) = (div_flux(psi0)?, div_flux(psi1)?);
    let (r0, r1) = (psi0.density(), psi1.density());
    let mut field = vec![0.0; grid.len()];
    let mut sum = 0.0;
    let mut linf = 0.0f64;
    for i in 0..grid.len() {
        if include.map_or(true, |m| m[i]) {
            let r = (r1[i] - r0[i]) / dt + 0.5 * (d0[i] + d1[i]) + 0.5 * rate * (r0[i] + r1[i]);
            field[i] = r;
            sum += r * r;
            linf = linf.max(r.abs());
        }
    }
    Ok(ContinuityResidual {
        field,
        l2: (sum * grid.cell_area()).sqrt(),
        linf,
        norm_ratio: psi1.norm_sqr() / psi0.norm_sqr(),
        expected_ratio: (-rate * dt).exp(),
    })
}
