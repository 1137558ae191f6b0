//! Sampled scalar and spinor fields on a [`Grid2D`].

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coords(i);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_uniform(&self) -> bool {
        let first = self.values[0];
        self.values.iter().all(|&v| v == first)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }
}

/// Complex wavefunction sampled row-major, x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexScalarField {
    grid: Grid2D,
    values: Vec<C64>,
}

impl ComplexScalarField {
    pub fn new(grid: Grid2D, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.coords(i);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `sum |psi|^2 dx dy`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, factor: C64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// L2 distance `sqrt(sum |a - b|^2 dx dy)`.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.cell_area()).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinorBasis {
    /// Components `(psi_+, psi_-)`.
    Circular,
    /// Components `(psi_x, psi_y)`.
    Cartesian,
}

/// Two-component polarisation field. In the circular basis
/// `psi_(+/-) = (psi_x -/+ i psi_y) / sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    first: ComplexScalarField,
    second: ComplexScalarField,
    basis: SpinorBasis,
}

impl SpinorField {
    pub fn new(first: ComplexScalarField, second: ComplexScalarField, basis: SpinorBasis) -> Result<Self> {
        first.grid().ensure_same(second.grid())?;
        Ok(Self { first, second, basis })
    }

    pub fn circular(plus: ComplexScalarField, minus: ComplexScalarField) -> Result<Self> {
        Self::new(plus, minus, SpinorBasis::Circular)
    }

    pub fn cartesian(psi_x: ComplexScalarField, psi_y: ComplexScalarField) -> Result<Self> {
        Self::new(psi_x, psi_y, SpinorBasis::Cartesian)
    }

    pub fn basis(&self) -> SpinorBasis {
        self.basis
    }

    pub fn grid(&self) -> &Grid2D {
        self.first.grid()
    }

    pub fn components(&self) -> (&ComplexScalarField, &ComplexScalarField) {
        (&self.first, &self.second)
    }

    pub fn into_components(self) -> (ComplexScalarField, ComplexScalarField) {
        (self.first, self.second)
    }

    pub fn to_basis(&self, basis: SpinorBasis) -> Self {
        if basis == self.basis {
            return self.clone();
        }
        let a = self.first.values();
        let b = self.second.values();
        let (u, v): (Vec<C64>, Vec<C64>) = match basis {
            // cartesian -> circular
            SpinorBasis::Circular => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| ((x - I * y) * FRAC_1_SQRT_2, (x + I * y) * FRAC_1_SQRT_2))
                .unzip(),
            // circular -> cartesian: psi_x = (p + m)/sqrt2, psi_y = i (p - m)/sqrt2
            SpinorBasis::Cartesian => a
                .iter()
                .zip(b)
                .map(|(&p, &m)| ((p + m) * FRAC_1_SQRT_2, I * (p - m) * FRAC_1_SQRT_2))
                .unzip(),
        };
        let grid = *self.grid();
        Self {
            first: ComplexScalarField { grid, values: u },
            second: ComplexScalarField { grid, values: v },
            basis,
        }
    }

    pub fn to_circular(&self) -> Self {
        self.to_basis(SpinorBasis::Circular)
    }

    pub fn to_cartesian(&self) -> Self {
        self.to_basis(SpinorBasis::Cartesian)
    }

    /// `F^dagger F`, identical in both bases.
    pub fn density(&self) -> Vec<f64> {
        self.first
            .values()
            .iter()
            .zip(self.second.values())
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.first.norm_sqr() + self.second.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.first.is_finite() && self.second.is_finite()
    }
}
