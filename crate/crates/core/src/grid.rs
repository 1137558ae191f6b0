//! Uniform cell-centred sampling of the cavity plane.
//!
//! Samples are stored row-major with `x` varying fastest, so the flat index of
//! `(ix, iy)` is `iy * nx + ix`. Coordinates are cell centred on
//! `[-L/2, L/2)`: `x_i = -Lx/2 + (i + 1/2) dx`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    periodic_x: bool,
    periodic_y: bool,
}

/// Build a grid. `spectral` additionally requires power-of-two counts and
/// periodic axes, which the FFT-based operators rely on.
pub fn make_grid(nx: usize, ny: usize, lx: f64, ly: f64, periodic: bool, spectral: bool) -> Result<Grid2D> {
    let grid = Grid2D::with_axes(nx, ny, lx, ly, periodic, periodic)?;
    if spectral {
        grid.require_spectral()?;
    }
    Ok(grid)
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64, periodic: bool) -> Result<Self> {
        Self::with_axes(nx, ny, lx, ly, periodic, periodic)
    }

    pub fn with_axes(nx: usize, ny: usize, lx: f64, ly: f64, periodic_x: bool, periodic_y: bool) -> Result<Self> {
        if nx < MIN_POINTS || ny < MIN_POINTS {
            return Err(Error::config(format!(
                "grid needs at least {MIN_POINTS} points per axis, got {nx}x{ny}"
            )));
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(Error::config(format!("grid lengths must be positive, got {lx} x {ly}")));
        }
        Ok(Self { nx, ny, lx, ly, periodic_x, periodic_y })
    }

    /// Error unless both axes are periodic with power-of-two counts.
    pub fn require_spectral(&self) -> Result<()> {
        if !self.nx.is_power_of_two() || !self.ny.is_power_of_two() {
            return Err(Error::config(format!(
                "spectral operators need power-of-two counts, got {}x{}",
                self.nx, self.ny
            )));
        }
        if !(self.periodic_x && self.periodic_y) {
            return Err(Error::config("spectral operators need a periodic grid"));
        }
        Ok(())
    }

    pub fn is_spectral(&self) -> bool {
        self.require_spectral().is_ok()
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn periodic_x(&self) -> bool {
        self.periodic_x
    }

    pub fn periodic_y(&self) -> bool {
        self.periodic_y
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        -0.5 * self.lx + (ix as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        -0.5 * self.ly + (iy as f64 + 0.5) * self.dy()
    }

    /// Coordinates of a flat index.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        (self.x(idx % self.nx), self.y(idx / self.nx))
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    /// Angular wavenumbers in FFT order along x.
    pub fn kxs(&self) -> Vec<f64> {
        fft_wavenumbers(self.nx, self.lx)
    }

    pub fn kys(&self) -> Vec<f64> {
        fft_wavenumbers(self.ny, self.ly)
    }

    /// Bounding box of the sample centres, `(x_min, x_max, y_min, y_max)`.
    pub fn sample_bounds(&self) -> (f64, f64, f64, f64) {
        (self.x(0), self.x(self.nx - 1), self.y(0), self.y(self.ny - 1))
    }

    /// Physical extent `(x_min, x_max, y_min, y_max)` of the domain.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        (-0.5 * self.lx, 0.5 * self.lx, -0.5 * self.ly, 0.5 * self.ly)
    }

    pub fn same_shape(&self, other: &Grid2D) -> bool {
        self.nx == other.nx
            && self.ny == other.ny
            && (self.lx - other.lx).abs() <= 1e-12 * self.lx
            && (self.ly - other.ly).abs() <= 1e-12 * self.ly
    }

    pub fn ensure_same(&self, other: &Grid2D) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{}x{} ({} x {}) vs {}x{} ({} x {})",
                self.nx, self.ny, self.lx, self.ly, other.nx, other.ny, other.lx, other.ly
            )))
        }
    }
}

/// `2 pi / L * [0, 1, ..., n/2 - 1, -n/2, ..., -1]`.
pub fn fft_wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let dk = 2.0 * PI / length;
    (0..n)
        .map(|i| {
            let m = if i < n.div_ceil(2) { i as i64 } else { i as i64 - n as i64 };
            m as f64 * dk
        })
        .collect()
}
