use crate::bohm::{density_mask, VelocityField2D};
use crate::error::{Error, Result};
use crate::field::C64;
use crate::grid::Grid2D;
use crate::medium::CavityMedium;

use super::fields::{FieldPoint, Fields3D};
use super::ZGrid;

/// Largest volume [`poynting_energy`] will materialise.
pub const MAX_STORED_SAMPLES: usize = 1 << 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    /// `2 Re[E* x B]`.
    pub s: [f64; 3],
    /// `gE |E|^2 + gB |B|^2`.
    pub u: f64,
    /// `2 m eps'' |E|^2`.
    pub w: f64,
}

impl EnergyPoint {
    pub fn from_fields(p: &FieldPoint, medium: &CavityMedium) -> Self {
        let [ex, ey, ez] = p.e.map(|c| c.conj());
        let [bx, by, bz] = p.b;
        let cross = [ey * bz - ez * by, ez * bx - ex * bz, ex * by - ey * bx];
        let e2: f64 = p.e.iter().map(|c| c.norm_sqr()).sum();
        let b2: f64 = p.b.iter().map(|c| c.norm_sqr()).sum();
        EnergyPoint {
            s: cross.map(|c: C64| 2.0 * c.re),
            u: medium.g_e * e2 + medium.g_b * b2,
            w: 2.0 * medium.mass * medium.eps_imag * e2,
        }
    }
}

/// Energy fields stored on the full volume, index `k * (nx ny) + idx`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFields3D {
    grid: Grid2D,
    zgrid: ZGrid,
    pub s: [Vec<f64>; 3],
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl EnergyFields3D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn zgrid(&self) -> &ZGrid {
        &self.zgrid
    }

    pub fn at(&self, idx: usize, k: usize) -> EnergyPoint {
        let i = k * self.grid.len() + idx;
        EnergyPoint { s: [self.s[0][i], self.s[1][i], self.s[2][i]], u: self.u[i], w: self.w[i] }
    }
}

pub fn poynting_energy(fields: &Fields3D) -> Result<EnergyFields3D> {
    let n = fields.grid().len();
    let nz = fields.zgrid().nz();
    if n * nz > MAX_STORED_SAMPLES {
        return Err(Error::config(format!(
            "{n} x {nz} samples is too large to store; use z_average_fields"
        )));
    }
    let mut out = EnergyFields3D {
        grid: *fields.grid(),
        zgrid: *fields.zgrid(),
        s: [vec![0.0; n * nz], vec![0.0; n * nz], vec![0.0; n * nz]],
        u: vec![0.0; n * nz],
        w: vec![0.0; n * nz],
    };
    for k in 0..nz {
        for idx in 0..n {
            let e = EnergyPoint::from_fields(&fields.at(idx, k), fields.medium());
            let i = k * n + idx;
            for c in 0..3 {
                out.s[c][i] = e.s[c];
            }
            out.u[i] = e.u;
            out.w[i] = e.w;
        }
    }
    Ok(out)
}

/// `<v> = int S dz / int u dz` per in-plane point.
#[derive(Debug, Clone, PartialEq)]
pub struct ZAveragedVelocity {
    pub planar: VelocityField2D,
    pub vz: Vec<f64>,
    /// `int u dz`.
    pub u_int: Vec<f64>,
    /// `int W dz`.
    pub w_int: Vec<f64>,
}

impl ZAveragedVelocity {
    fn from_integrals(grid: Grid2D, s: [Vec<f64>; 3], u: Vec<f64>, w: Vec<f64>) -> Self {
        let mask = density_mask(&u);
        let ratio = |c: &Vec<f64>| c.iter().zip(&u).zip(&mask).map(|((a, b), &m)| if m { a / b } else { 0.0 }).collect();
        let (vx, vy, vz) = (ratio(&s[0]), ratio(&s[1]), ratio(&s[2]));
        ZAveragedVelocity { planar: VelocityField2D::new(grid, vx, vy, mask), vz, u_int: u, w_int: w }
    }
}

pub fn z_average_velocity(energy: &EnergyFields3D) -> ZAveragedVelocity {
    let n = energy.grid.len();
    let mut s = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..energy.zgrid.nz() {
        let wk = energy.zgrid.weight(k);
        for idx in 0..n {
            let e = energy.at(idx, k);
            for c in 0..3 {
                s[c][idx] += wk * e.s[c];
            }
            u[idx] += wk * e.u;
            w[idx] += wk * e.w;
        }
    }
    ZAveragedVelocity::from_integrals(energy.grid, s, u, w)
}

/// Streaming form of [`z_average_velocity`] that never stores the volume.
pub fn z_average_fields(fields: &Fields3D) -> ZAveragedVelocity {
    let n = fields.grid().len();
    let zg = *fields.zgrid();
    let medium = *fields.medium();
    let include = fields.options().include_grad_v;
    let profiles = fields.uniform_profiles();
    let weights: Vec<f64> = (0..zg.nz()).map(|k| zg.weight(k)).collect();
    let mut s = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; n];
    for idx in 0..n {
        let mut acc = [0.0f64; 5];
        for (k, wk) in weights.iter().enumerate() {
            let p = match &profiles {
                Some(ps) => fields.point_with(idx, &ps[k], include),
                None => fields.point_with(idx, &fields.profile(idx, k), include),
            };
            let e = EnergyPoint::from_fields(&p, &medium);
            acc[0] += wk * e.s[0];
            acc[1] += wk * e.s[1];
            acc[2] += wk * e.s[2];
            acc[3] += wk * e.u;
            acc[4] += wk * e.w;
        }
        s[0][idx] = acc[0];
        s[1][idx] = acc[1];
        s[2][idx] = acc[2];
        u[idx] = acc[3];
        w[idx] = acc[4];
    }
    ZAveragedVelocity::from_integrals(*fields.grid(), s, u, w)
}
