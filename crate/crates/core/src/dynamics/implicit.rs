//! Crank-Nicolson reference propagator on the 5-point Laplacian, solved by
//! preconditioned BiCGSTAB.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::field::{ComplexScalarField, C64, I};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;
use crate::spectral::Fft2;

use super::{ComplexPotential, PropagatorConfig, Scheme};

#[derive(Debug)]
pub struct CrankNicolson {
    grid: Grid2D,
    /// `1/(2 eps' m)`.
    kin: f64,
    /// Local `V - i(L/2 + sponge)`.
    pot: Vec<C64>,
    half_dt: f64,
    fft: Fft2,
    /// Inverse symbol of the constant-coefficient approximation of `A`.
    precond: Vec<C64>,
    max_iterations: usize,
    tolerance: f64,
}

impl CrankNicolson {
    pub fn new(pot: &ComplexPotential, medium: &CavityMedium, cfg: &PropagatorConfig) -> Result<Self> {
        let grid = *pot.grid();
        if !(grid.periodic_x() && grid.periodic_y()) {
            return Err(Error::config("implicit propagator needs a periodic grid"));
        }
        cfg.validate(pot)?;
        let kin = 0.5 / medium.kinetic_mass();
        let potv: Vec<C64> = (0..grid.len())
            .map(|i| pot.value(i) - I * cfg.boundary.absorption(&grid, i))
            .collect();
        let mean = potv.iter().sum::<C64>() / potv.len() as f64;
        let half_dt = 0.5 * cfg.dt;
        let sym = |n: usize, h: f64| -> Vec<f64> {
            (0..n).map(|i| (2.0 - 2.0 * (TAU * i as f64 / n as f64).cos()) / (h * h)).collect()
        };
        let (sx, sy) = (sym(grid.nx(), grid.dx()), sym(grid.ny(), grid.dy()));
        let mut precond = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let a = C64::new(1.0, 0.0) + I * half_dt * (kin * (sx[i] + sy[j]) + mean);
                precond.push(a.inv());
            }
        }
        Ok(Self {
            grid,
            kin,
            pot: potv,
            half_dt,
            fft: Fft2::new(grid.nx(), grid.ny()),
            precond,
            max_iterations: cfg.max_iterations,
            tolerance: cfg.tolerance,
        })
    }

    /// `H f` with the periodic 5-point Laplacian.
    fn apply_h(&self, f: &[C64]) -> Vec<C64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (ax, ay) = (self.kin / (self.grid.dx() * self.grid.dx()), self.kin / (self.grid.dy() * self.grid.dy()));
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for j in 0..ny {
            let up = ((j + 1) % ny) * nx;
            let dn = ((j + ny - 1) % ny) * nx;
            let row = j * nx;
            for i in 0..nx {
                let c = f[row + i];
                let lx = f[row + (i + 1) % nx] + f[row + (i + nx - 1) % nx] - 2.0 * c;
                let ly = f[up + i] + f[dn + i] - 2.0 * c;
                out[row + i] = -(lx * ax + ly * ay) + self.pot[row + i] * c;
            }
        }
        out
    }

    fn apply_a(&self, f: &[C64]) -> Vec<C64> {
        let h = self.apply_h(f);
        f.iter().zip(h).map(|(v, hv)| v + I * self.half_dt * hv).collect()
    }

    fn precondition(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.fft.forward(&mut buf);
        for (v, p) in buf.iter_mut().zip(&self.precond) {
            *v *= p;
        }
        self.fft.inverse(&mut buf);
        buf
    }

    /// One step: solve `(1 + i dt/2 H) x = (1 - i dt/2 H) psi`.
    pub fn step(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let h = self.apply_h(psi);
        let b: Vec<C64> = psi.iter().zip(h).map(|(v, hv)| v - I * self.half_dt * hv).collect();
        bicgstab(|x| self.apply_a(x), |x| self.precondition(x), &b, psi, self.max_iterations, self.tolerance)
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Right-preconditioned BiCGSTAB to relative residual `tol`.
fn bicgstab(
    a: impl Fn(&[C64]) -> Vec<C64>,
    m_inv: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    x0: &[C64],
    max_iterations: usize,
    tol: f64,
) -> Result<Vec<C64>> {
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(vec![C64::new(0.0, 0.0); b.len()]);
    }
    let mut x = x0.to_vec();
    let ax = a(&x);
    let mut r: Vec<C64> = b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect();
    let mut rel = norm(&r) / bnorm;
    if rel < tol {
        return Ok(x);
    }
    let r_hat = r.clone();
    let zero = C64::new(0.0, 0.0);
    let (mut rho, mut alpha, mut omega) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut v = vec![zero; b.len()];
    let mut p = vec![zero; b.len()];
    for _ in 0..max_iterations {
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..p.len() {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = m_inv(&p);
        v = a(&p_hat);
        alpha = rho_new / dot(&r_hat, &v);
        let s: Vec<C64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm(&s) / bnorm < tol {
            for (xi, pi) in x.iter_mut().zip(&p_hat) {
                *xi += alpha * pi;
            }
            return Ok(x);
        }
        let s_hat = m_inv(&s);
        let t = a(&s_hat);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..x.len() {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        rho = rho_new;
        rel = norm(&r) / bnorm;
        if rel < tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence { iterations: max_iterations, residual: rel })
}

pub fn implicit_reference_propagate(
    psi: &ComplexScalarField,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
) -> Result<ComplexScalarField> {
    let cfg = PropagatorConfig { scheme: Scheme::ImplicitMidpoint, ..*cfg };
    super::propagate(psi, pot, medium, &cfg, n_steps)
}
