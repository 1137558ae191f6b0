use crate::error::Result;
use crate::field::{ComplexScalarField, SpinorField, C64};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;
use crate::spectral::{DerivativeMethod, Differentiator};

use super::density_mask;

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField2D {
    grid: Grid2D,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub mask: Vec<bool>,
}

impl VelocityField2D {
    pub fn new(grid: Grid2D, vx: Vec<f64>, vy: Vec<f64>, mask: Vec<bool>) -> Self {
        assert!(vx.len() == grid.len() && vy.len() == grid.len() && mask.len() == grid.len());
        Self { grid, vx, vy, mask }
    }

    pub fn uniform(grid: Grid2D, vx: f64, vy: f64) -> Self {
        let n = grid.len();
        Self { grid, vx: vec![vx; n], vy: vec![vy; n], mask: vec![true; n] }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// True when no point survives the density floor.
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Bilinear interpolation between cell centres; `None` outside the sampled
    /// region of non-periodic axes or next to a masked sample.
    pub fn sample(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let g = &self.grid;
        let (i0, i1, fx) = bracket(x, g.x(0), g.dx(), g.nx(), g.periodic_x())?;
        let (j0, j1, fy) = bracket(y, g.y(0), g.dy(), g.ny(), g.periodic_y())?;
        let idx = [g.index(i0, j0), g.index(i1, j0), g.index(i0, j1), g.index(i1, j1)];
        if idx.iter().any(|&k| !self.mask[k]) {
            return None;
        }
        let w = [(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy];
        let mut v = (0.0, 0.0);
        for (k, wk) in idx.iter().zip(w) {
            v.0 += wk * self.vx[*k];
            v.1 += wk * self.vy[*k];
        }
        Some(v)
    }
}

fn bracket(x: f64, x0: f64, h: f64, n: usize, periodic: bool) -> Option<(usize, usize, f64)> {
    let mut s = (x - x0) / h;
    if periodic {
        s = s.rem_euclid(n as f64);
        let i0 = (s.floor() as usize).min(n - 1);
        Some((i0, (i0 + 1) % n, s - i0 as f64))
    } else {
        if !(0.0..=(n - 1) as f64).contains(&s) {
            return None;
        }
        let i0 = (s.floor() as usize).min(n - 2);
        Some((i0, i0 + 1, s - i0 as f64))
    }
}

/// `v = Im[Psi* grad Psi] / (eps' m |Psi|^2)` on points above the density floor.
pub fn scalar_velocity(psi: &ComplexScalarField, medium: &CavityMedium, method: DerivativeMethod) -> Result<VelocityField2D> {
    let grid = *psi.grid();
    let d = Differentiator::new(&grid, method)?;
    let (gx, gy) = d.gradient(psi.values())?;
    let density = psi.density();
    let mask = density_mask(&density);
    let mk = medium.kinetic_mass();
    let mut vx = vec![0.0; grid.len()];
    let mut vy = vec![0.0; grid.len()];
    for i in 0..grid.len() {
        if mask[i] {
            let c = psi.values()[i].conj();
            vx[i] = (c * gx[i]).im / (mk * density[i]);
            vy[i] = (c * gy[i]).im / (mk * density[i]);
        }
    }
    Ok(VelocityField2D { grid, vx, vy, mask })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliVelocity {
    pub total: VelocityField2D,
    pub convective: VelocityField2D,
    /// `curl(s z) / (2 eps' m rho)` with `s = |Psi_+|^2 - |Psi_-|^2`.
    pub spin: VelocityField2D,
}

pub fn pauli_velocity(spinor: &SpinorField, medium: &CavityMedium, method: DerivativeMethod) -> Result<PauliVelocity> {
    let grid = *spinor.grid();
    let circ = spinor.to_circular();
    let (p, m) = circ.components();
    let d = Differentiator::new(&grid, method)?;
    let (px, py) = d.gradient(p.values())?;
    let (mx, my) = d.gradient(m.values())?;
    let density = circ.density();
    let mask = density_mask(&density);
    let mk = medium.kinetic_mass();
    let n = grid.len();
    let (mut cx, mut cy, mut sx, mut sy) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        if !mask[i] {
            continue;
        }
        let (a, b): (C64, C64) = (p.values()[i].conj(), m.values()[i].conj());
        let rho = density[i];
        cx[i] = ((a * px[i]).im + (b * mx[i]).im) / (mk * rho);
        cy[i] = ((a * py[i]).im + (b * my[i]).im) / (mk * rho);
        // grad s by the product rule
        let ds_x = 2.0 * ((a * px[i]).re - (b * mx[i]).re);
        let ds_y = 2.0 * ((a * py[i]).re - (b * my[i]).re);
        sx[i] = ds_y / (2.0 * mk * rho);
        sy[i] = -ds_x / (2.0 * mk * rho);
    }
    let tx: Vec<f64> = cx.iter().zip(&sx).map(|(a, b)| a + b).collect();
    let ty: Vec<f64> = cy.iter().zip(&sy).map(|(a, b)| a + b).collect();
    Ok(PauliVelocity {
        total: VelocityField2D::new(grid, tx, ty, mask.clone()),
        convective: VelocityField2D::new(grid, cx, cy, mask.clone()),
        spin: VelocityField2D::new(grid, sx, sy, mask),
    })
}
