//! Effective in-plane potential `V = -q pi dD / (sqrt(eps') D0^2)` generated
//! by a local change `dD(x, y)` of the mirror spacing.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::grid::Grid2D;
use crate::medium::CavityMedium;
use crate::warning::{GuardConfig, Warning};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// Constant spacing change.
    Uniform { delta_d: f64 },
    /// `delta_d_left` for `x < x0`, `delta_d_right` for `x >= x0`.
    Step { x0: f64, delta_d_left: f64, delta_d_right: f64 },
    /// Guide along x: `delta_d_core` for `|y - y0| < width/2`, else `delta_d_clad`.
    RectangularWaveguide {
        y0: f64,
        width: f64,
        delta_d_core: f64,
        delta_d_clad: f64,
    },
    /// Spacing map, row-major with x fastest.
    TabulatedDeltaD { nx: usize, ny: usize, values: Vec<f64> },
    /// Potential map given directly in energy units.
    TabulatedPotential { nx: usize, ny: usize, values: Vec<f64> },
}

impl PotentialSpec {
    pub fn flat() -> Self {
        PotentialSpec::Uniform { delta_d: 0.0 }
    }

    /// Spacing change at a point, or `None` for a direct potential map.
    fn delta_d(&self, grid: &Grid2D, ix: usize, iy: usize) -> Option<f64> {
        match self {
            PotentialSpec::Uniform { delta_d } => Some(*delta_d),
            PotentialSpec::Step { x0, delta_d_left, delta_d_right } => {
                Some(if grid.x(ix) < *x0 { *delta_d_left } else { *delta_d_right })
            }
            PotentialSpec::RectangularWaveguide { y0, width, delta_d_core, delta_d_clad } => {
                Some(if (grid.y(iy) - y0).abs() < 0.5 * width { *delta_d_core } else { *delta_d_clad })
            }
            PotentialSpec::TabulatedDeltaD { values, .. } => Some(values[grid.index(ix, iy)]),
            PotentialSpec::TabulatedPotential { .. } => None,
        }
    }

    pub fn validate_for(&self, grid: &Grid2D) -> Result<()> {
        let check_values = |nx: usize, ny: usize, values: &[f64]| -> Result<()> {
            if nx != grid.nx() || ny != grid.ny() || values.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "tabulated map is {nx}x{ny} with {} values, grid is {}x{}",
                    values.len(),
                    grid.nx(),
                    grid.ny()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("tabulated map contains non-finite values"));
            }
            Ok(())
        };
        let finite = |v: &[f64]| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::config("potential parameters must be finite"))
            }
        };
        match self {
            PotentialSpec::Uniform { delta_d } => finite(&[*delta_d]),
            PotentialSpec::Step { x0, delta_d_left, delta_d_right } => finite(&[*x0, *delta_d_left, *delta_d_right]),
            PotentialSpec::RectangularWaveguide { y0, width, delta_d_core, delta_d_clad } => {
                finite(&[*y0, *width, *delta_d_core, *delta_d_clad])?;
                if *width <= 0.0 {
                    return Err(Error::config("waveguide width must be > 0"));
                }
                Ok(())
            }
            PotentialSpec::TabulatedDeltaD { nx, ny, values } | PotentialSpec::TabulatedPotential { nx, ny, values } => {
                check_values(*nx, *ny, values)
            }
        }
    }
}

/// `dV/d(dD)`, the factor mapping a spacing change to an energy shift.
pub fn potential_per_spacing(medium: &CavityMedium) -> f64 {
    -(medium.q as f64) * PI / (medium.eps_real.sqrt() * medium.d0 * medium.d0)
}

/// Evaluate `V(x, y)`. Points with `|V|/m` above the guard produce a warning
/// naming the worst offender, or a validation error in strict mode.
pub fn eval_potential(
    spec: &PotentialSpec,
    grid: &Grid2D,
    medium: &CavityMedium,
    guards: &GuardConfig,
) -> Result<(RealField, Vec<Warning>)> {
    spec.validate_for(grid)?;
    let factor = potential_per_spacing(medium);
    let mut values = Vec::with_capacity(grid.len());
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let v = match spec.delta_d(grid, ix, iy) {
                Some(dd) => dd * factor,
                None => match spec {
                    PotentialSpec::TabulatedPotential { values, .. } => values[grid.index(ix, iy)],
                    _ => unreachable!(),
                },
            };
            values.push(v);
        }
    }
    let field = RealField::new(*grid, values)?;

    let mut warnings = Vec::new();
    let (worst, idx) = field
        .values()
        .iter()
        .enumerate()
        .fold((0.0f64, 0usize), |(w, wi), (i, v)| if v.abs() > w { (v.abs(), i) } else { (w, wi) });
    let ratio = worst / medium.mass;
    if ratio > guards.potential_ratio {
        let (x, y) = grid.coords(idx);
        let message = format!("|V|/m = {ratio:.3e} exceeds {} at ({x}, {y})", guards.potential_ratio);
        if guards.strict {
            return Err(Error::Validation { message, location: Some((x, y)) });
        }
        warnings.push(Warning::new("potential-ratio", message).at(x, y).with_value(ratio));
    }
    Ok((field, warnings))
}
