//! Derivatives on a [`Grid2D`]: FFT based on periodic power-of-two grids, or
//! second-order finite differences (one-sided at non-periodic edges).

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{C64, I};
use crate::grid::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeMethod {
    #[default]
    Spectral,
    CentralDifference,
}

/// Unnormalised forward / normalised inverse 2D FFT on row-major data.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.nx, self.ny)
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
        }
    }

    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.fwd_x, &self.fwd_y);
    }

    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inv_x, &self.inv_y);
        let norm = 1.0 / (self.nx * self.ny) as f64;
        for v in data.iter_mut() {
            *v *= norm;
        }
    }

    fn transform(&self, data: &mut [C64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.nx * self.ny);
        fx.process(data);
        let mut t = vec![C64::new(0.0, 0.0); data.len()];
        transpose(data, &mut t, self.nx, self.ny);
        fy.process(&mut t);
        transpose(&t, data, self.ny, self.nx);
    }
}

/// `src` has `rows` rows of length `cols`.
fn transpose(src: &[C64], dst: &mut [C64], cols: usize, rows: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Derivative operators bound to one grid.
#[derive(Debug)]
pub struct Differentiator {
    grid: Grid2D,
    method: DerivativeMethod,
    fft: Option<Fft2>,
    /// First-derivative wavenumbers with the Nyquist mode zeroed.
    kx_d: Vec<f64>,
    ky_d: Vec<f64>,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl Differentiator {
    pub fn new(grid: &Grid2D, method: DerivativeMethod) -> Result<Self> {
        let (fft, kx, ky) = match method {
            DerivativeMethod::Spectral => {
                grid.require_spectral()?;
                (Some(Fft2::new(grid.nx(), grid.ny())), grid.kxs(), grid.kys())
            }
            DerivativeMethod::CentralDifference => (None, Vec::new(), Vec::new()),
        };
        let zero_nyquist = |k: &[f64]| {
            let mut k = k.to_vec();
            if !k.is_empty() {
                let n = k.len();
                k[n / 2] = 0.0;
            }
            k
        };
        Ok(Self { grid: *grid, method, fft, kx_d: zero_nyquist(&kx), ky_d: zero_nyquist(&ky), kx, ky })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn method(&self) -> DerivativeMethod {
        self.method
    }

    fn spectral_apply(&self, f: &[C64], mult: impl Fn(usize, usize) -> C64) -> Vec<C64> {
        let fft = self.fft.as_ref().expect("spectral differentiator");
        let mut buf = f.to_vec();
        fft.forward(&mut buf);
        let nx = self.grid.nx();
        for (idx, v) in buf.iter_mut().enumerate() {
            *v *= mult(idx % nx, idx / nx);
        }
        fft.inverse(&mut buf);
        buf
    }

    fn check(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!("expected {} samples, got {}", self.grid.len(), f.len())));
        }
        Ok(())
    }

    pub fn dx(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check(f)?;
        Ok(match self.method {
            DerivativeMethod::Spectral => self.spectral_apply(f, |i, _| I * self.kx_d[i]),
            DerivativeMethod::CentralDifference => {
                let g = &self.grid;
                fd_first(f, g.nx(), g.ny(), g.dx(), g.periodic_x(), 1, g.nx())
            }
        })
    }

    pub fn dy(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check(f)?;
        Ok(match self.method {
            DerivativeMethod::Spectral => self.spectral_apply(f, |_, j| I * self.ky_d[j]),
            DerivativeMethod::CentralDifference => {
                let g = &self.grid;
                fd_first(f, g.ny(), g.nx(), g.dy(), g.periodic_y(), g.nx(), 1)
            }
        })
    }

    pub fn gradient(&self, f: &[C64]) -> Result<(Vec<C64>, Vec<C64>)> {
        Ok((self.dx(f)?, self.dy(f)?))
    }

    pub fn laplacian(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check(f)?;
        Ok(match self.method {
            DerivativeMethod::Spectral => {
                self.spectral_apply(f, |i, j| C64::new(-(self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j]), 0.0))
            }
            DerivativeMethod::CentralDifference => {
                let g = &self.grid;
                let a = fd_second(f, g.nx(), g.ny(), g.dx(), g.periodic_x(), 1, g.nx());
                let b = fd_second(f, g.ny(), g.nx(), g.dy(), g.periodic_y(), g.nx(), 1);
                a.into_iter().zip(b).map(|(p, q)| p + q).collect()
            }
        })
    }

    pub fn dx_real(&self, f: &[f64]) -> Result<Vec<f64>> {
        Ok(self.dx(&to_complex(f))?.into_iter().map(|v| v.re).collect())
    }

    pub fn dy_real(&self, f: &[f64]) -> Result<Vec<f64>> {
        Ok(self.dy(&to_complex(f))?.into_iter().map(|v| v.re).collect())
    }
}

pub fn to_complex(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// Derivative along an axis of length `n` with sample `stride`; `lines`
/// independent lines are offset by `line_stride`.
fn fd_first(f: &[C64], n: usize, lines: usize, h: f64, periodic: bool, stride: usize, line_stride: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); f.len()];
    let inv = 0.5 / h;
    for l in 0..lines {
        let at = |i: usize| f[l * line_stride + i * stride];
        for i in 0..n {
            let d = if periodic {
                at((i + 1) % n) - at((i + n - 1) % n)
            } else if i == 0 {
                -3.0 * at(0) + 4.0 * at(1) - at(2)
            } else if i == n - 1 {
                3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)
            } else {
                at(i + 1) - at(i - 1)
            };
            out[l * line_stride + i * stride] = d * inv;
        }
    }
    out
}

fn fd_second(f: &[C64], n: usize, lines: usize, h: f64, periodic: bool, stride: usize, line_stride: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); f.len()];
    let inv = 1.0 / (h * h);
    for l in 0..lines {
        let at = |i: usize| f[l * line_stride + i * stride];
        for i in 0..n {
            let d = if periodic {
                at((i + 1) % n) - 2.0 * at(i) + at((i + n - 1) % n)
            } else if i == 0 {
                2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)
            } else if i == n - 1 {
                2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)
            } else {
                at(i + 1) - 2.0 * at(i) + at(i - 1)
            };
            out[l * line_stride + i * stride] = d * inv;
        }
    }
    out
}
