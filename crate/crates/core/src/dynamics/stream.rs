use crate::error::Result;
use crate::field::{ComplexScalarField, SpinorField};
use crate::medium::CavityMedium;
use crate::spectral::{DerivativeMethod, Differentiator};

use super::{propagate, ComplexPotential, PropagatorConfig};

/// Scalar `Q` generating the transverse pair `(Psi_x, Psi_y) = (-dQ/dy, dQ/dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamFunction {
    pub q: ComplexScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamSpinor {
    pub cartesian: SpinorField,
    pub circular: SpinorField,
}

/// Spectral derivatives of `Q`. The circular components equal
/// `-i d_+ Q` and `i d_- Q` with `d_(+/-) = (d_x -/+ i d_y)/sqrt(2)`.
pub fn spinor_from_stream(stream: &StreamFunction) -> Result<StreamSpinor> {
    let grid = *stream.q.grid();
    let d = Differentiator::new(&grid, DerivativeMethod::Spectral)?;
    let (qx, qy) = d.gradient(stream.q.values())?;
    let psi_x = ComplexScalarField::new(grid, qy.into_iter().map(|v| -v).collect())?;
    let psi_y = ComplexScalarField::new(grid, qx)?;
    let cartesian = SpinorField::cartesian(psi_x, psi_y)?;
    let circular = cartesian.to_circular();
    Ok(StreamSpinor { cartesian, circular })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransversalityResidual {
    pub linf: f64,
    pub rms: f64,
    /// `max(max|dPsi_x/dx|, max|dPsi_y/dy|)`, the size of the cancelling terms.
    pub scale: f64,
}

impl TransversalityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.linf / self.scale
        }
    }
}

/// Norms of `dPsi_x/dx + dPsi_y/dy` with spectral derivatives.
pub fn transversality_residual(psi_x: &ComplexScalarField, psi_y: &ComplexScalarField) -> Result<TransversalityResidual> {
    psi_x.grid().ensure_same(psi_y.grid())?;
    let d = Differentiator::new(psi_x.grid(), DerivativeMethod::Spectral)?;
    let a = d.dx(psi_x.values())?;
    let b = d.dy(psi_y.values())?;
    let mut linf = 0.0f64;
    let mut sum = 0.0;
    let mut scale = 0.0f64;
    for (u, v) in a.iter().zip(&b) {
        let div = (u + v).norm();
        linf = linf.max(div);
        sum += div * div;
        scale = scale.max(u.norm()).max(v.norm());
    }
    Ok(TransversalityResidual { linf, rms: (sum / a.len() as f64).sqrt(), scale })
}

/// `Q` obeys the same effective equation as the scalar wavefunction.
pub fn stream_propagate(
    stream: &StreamFunction,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
) -> Result<StreamFunction> {
    Ok(StreamFunction { q: propagate(&stream.q, pot, medium, cfg, n_steps)? })
}
