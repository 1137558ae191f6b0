use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{RealField, C64, I};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;
use crate::spectral::{DerivativeMethod, Differentiator};
use crate::warning::{GuardConfig, Warning};

use super::{PlanarSource, ZGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReconstructionOptions {
    pub method: DerivativeMethod,
    /// Add `E_z = div(Psi) cos(chi)/kappa` so that `div E = 0`.
    pub longitudinal: bool,
    /// Keep the `grad V` contributions to B, dropped in the paraxial limit.
    pub include_grad_v: bool,
    pub t: f64,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self { method: DerivativeMethod::Spectral, longitudinal: false, include_grad_v: false, t: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    pub e: [C64; 3],
    pub b: [C64; 3],
}

/// Mode profile at one height: `sin(chi)`, `d/dz sin(chi)`, `cos(chi)/kappa`,
/// plus the pieces needed for in-plane derivatives through `V`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pub f: C64,
    pub fz: C64,
    pub g: C64,
    /// `d f / dV`.
    pub f_v: C64,
    /// `d g / dV`.
    pub g_v: C64,
}

impl Profile {
    pub fn new(medium: &CavityMedium, v: f64, z: f64) -> Self {
        let se = medium.eps_real.sqrt();
        let kappa = se * C64::new(medium.mass + v, -0.5 * medium.gamma);
        let chi = kappa * z;
        let (s, c) = (chi.sin(), chi.cos());
        Profile {
            f: s,
            fz: kappa * c,
            g: c / kappa,
            f_v: c * se * z,
            g_v: -s * se * z / kappa - c * se / (kappa * kappa),
        }
    }
}

/// Lazily evaluated 3D field: per-point in-plane data is stored, the z
/// dependence is generated on demand.
#[derive(Debug, Clone)]
pub struct Fields3D {
    grid: Grid2D,
    zgrid: ZGrid,
    medium: CavityMedium,
    options: ReconstructionOptions,
    pub(crate) psi_x: Vec<C64>,
    pub(crate) psi_y: Vec<C64>,
    /// `dPsi_y/dx - dPsi_x/dy`.
    pub(crate) curl: Vec<C64>,
    pub(crate) div: Vec<C64>,
    pub(crate) div_x: Vec<C64>,
    pub(crate) div_y: Vec<C64>,
    pub(crate) v: Vec<f64>,
    pub(crate) v_x: Vec<f64>,
    pub(crate) v_y: Vec<f64>,
    pub(crate) uniform_v: Option<f64>,
    phase: C64,
    spinor: bool,
}

/// Reconstruct the cavity field. `v = None` means a flat cavity.
pub fn reconstruct_fields(
    source: &PlanarSource,
    v: Option<&RealField>,
    medium: &CavityMedium,
    zgrid: &ZGrid,
    options: &ReconstructionOptions,
    guards: &GuardConfig,
) -> Result<(Fields3D, Vec<Warning>)> {
    let grid = *source.grid();
    medium.validate()?;
    zgrid.check_resolution(medium)?;
    let d = Differentiator::new(&grid, options.method)?;
    let (px, py) = source.cartesian();
    let (psi_x, psi_y) = (px.into_values(), py.into_values());
    let (pxx, pxy) = d.gradient(&psi_x)?;
    let (pyx, pyy) = d.gradient(&psi_y)?;
    let curl: Vec<C64> = pyx.iter().zip(&pxy).map(|(a, b)| a - b).collect();
    let div: Vec<C64> = pxx.iter().zip(&pyy).map(|(a, b)| a + b).collect();
    let (div_x, div_y) = if options.longitudinal { d.gradient(&div)? } else { (Vec::new(), Vec::new()) };
    let v_vals = match v {
        Some(f) => {
            grid.ensure_same(f.grid())?;
            f.values().to_vec()
        }
        None => vec![0.0; grid.len()],
    };
    let uniform_v = v_vals.iter().all(|&x| x == v_vals[0]).then_some(v_vals[0]);
    let (v_x, v_y) = if uniform_v.is_some() {
        (vec![0.0; grid.len()], vec![0.0; grid.len()])
    } else {
        (d.dx_real(&v_vals)?, d.dy_real(&v_vals)?)
    };
    let warnings = medium
        .guard_warnings(guards)
        .into_iter()
        .filter(|w| w.code == "leakage-depth")
        .collect();
    let fields = Fields3D {
        grid,
        zgrid: *zgrid,
        medium: *medium,
        options: *options,
        psi_x,
        psi_y,
        curl,
        div,
        div_x,
        div_y,
        v: v_vals,
        v_x,
        v_y,
        uniform_v,
        phase: C64::from_polar(1.0, -medium.mass * options.t),
        spinor: matches!(source, PlanarSource::Spinor(_)),
    };
    Ok((fields, warnings))
}

impl Fields3D {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn zgrid(&self) -> &ZGrid {
        &self.zgrid
    }

    pub fn medium(&self) -> &CavityMedium {
        &self.medium
    }

    pub fn options(&self) -> &ReconstructionOptions {
        &self.options
    }

    pub fn is_spinor(&self) -> bool {
        self.spinor
    }

    pub(crate) fn profile(&self, idx: usize, k: usize) -> Profile {
        Profile::new(&self.medium, self.v[idx], self.zgrid.z(k))
    }

    /// Profiles per height when `V` is uniform.
    pub(crate) fn uniform_profiles(&self) -> Option<Vec<Profile>> {
        self.uniform_v.map(|v| (0..self.zgrid.nz()).map(|k| Profile::new(&self.medium, v, self.zgrid.z(k))).collect())
    }

    pub(crate) fn point_with(&self, idx: usize, p: &Profile, include_grad_v: bool) -> FieldPoint {
        let (px, py) = (self.psi_x[idx], self.psi_y[idx]);
        let (ez, mut cx, mut cy) = if self.options.longitudinal {
            let dv = self.div[idx];
            (dv * p.g, self.div_y[idx] * p.g - py * p.fz, px * p.fz - self.div_x[idx] * p.g)
        } else {
            (C64::new(0.0, 0.0), -py * p.fz, px * p.fz)
        };
        let mut cz = self.curl[idx] * p.f;
        if include_grad_v && self.uniform_v.is_none() {
            let (vx, vy) = (self.v_x[idx], self.v_y[idx]);
            cz += (py * vx - px * vy) * p.f_v;
            if self.options.longitudinal {
                let dv = self.div[idx];
                cx += dv * p.g_v * vy;
                cy -= dv * p.g_v * vx;
            }
        }
        let inv = 1.0 / (I * self.medium.mass);
        let ph = self.phase;
        FieldPoint {
            e: [px * p.f * ph, py * p.f * ph, ez * ph],
            b: [cx * inv * ph, cy * inv * ph, cz * inv * ph],
        }
    }

    /// Field at grid point `idx` and height index `k`.
    pub fn at(&self, idx: usize, k: usize) -> FieldPoint {
        self.point_with(idx, &self.profile(idx, k), self.options.include_grad_v)
    }

    /// Field at grid point `idx` and arbitrary height `z`.
    pub fn at_height(&self, idx: usize, z: f64) -> FieldPoint {
        self.point_with(idx, &Profile::new(&self.medium, self.v[idx], z), self.options.include_grad_v)
    }

    /// `dE/dz` at grid point `idx` and height index `k` (`d/dz cos(chi)/kappa = -sin(chi)`).
    pub fn dz_e(&self, idx: usize, k: usize) -> [C64; 3] {
        let p = self.profile(idx, k);
        let ez = if self.options.longitudinal { -self.div[idx] * p.f } else { C64::new(0.0, 0.0) };
        [self.psi_x[idx] * p.fz, self.psi_y[idx] * p.fz, ez].map(|c| c * self.phase)
    }

    /// The `grad V` part of B at a point, whether or not it is included.
    pub fn grad_v_term(&self, idx: usize, k: usize) -> [C64; 3] {
        let p = self.profile(idx, k);
        let full = self.point_with(idx, &p, true);
        let base = self.point_with(idx, &p, false);
        [full.b[0] - base.b[0], full.b[1] - base.b[1], full.b[2] - base.b[2]]
    }

    /// Largest `|grad V term| / |B|` over a sparse sample of the volume.
    pub fn grad_v_diagnostic(&self) -> f64 {
        if self.uniform_v.is_some() {
            return 0.0;
        }
        let mut worst = 0.0f64;
        let stride_p = (self.grid.len() / 4096).max(1);
        let stride_z = (self.zgrid.nz() / 16).max(1);
        for idx in (0..self.grid.len()).step_by(stride_p) {
            for k in (1..self.zgrid.nz() - 1).step_by(stride_z) {
                let t = self.grad_v_term(idx, k);
                let b = self.at(idx, k).b;
                let tn = t.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                let bn = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if bn > 0.0 {
                    worst = worst.max(tn / bn);
                }
            }
        }
        worst
    }

    pub fn slice_z(&self, k: usize) -> FieldSlice {
        let n = self.grid.len();
        let mut s = FieldSlice::zeros(n);
        for idx in 0..n {
            let p = self.at(idx, k);
            for c in 0..3 {
                s.e[c][idx] = p.e[c];
                s.b[c][idx] = p.b[c];
            }
        }
        s
    }

    /// `x`-`z` slice at row `iy`, stored `k * nx + ix`.
    pub fn slice_xz(&self, iy: usize) -> FieldSlice {
        let (nx, nz) = (self.grid.nx(), self.zgrid.nz());
        let mut s = FieldSlice::zeros(nx * nz);
        for k in 0..nz {
            for ix in 0..nx {
                let p = self.at(self.grid.index(ix, iy), k);
                for c in 0..3 {
                    s.e[c][k * nx + ix] = p.e[c];
                    s.b[c][k * nx + ix] = p.b[c];
                }
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSlice {
    pub e: [Vec<C64>; 3],
    pub b: [Vec<C64>; 3],
}

impl FieldSlice {
    fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self { e: [z.clone(), z.clone(), z.clone()], b: [z.clone(), z.clone(), z] }
    }
}
