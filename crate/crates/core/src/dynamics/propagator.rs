use crate::error::{Error, Result};
use crate::field::{ComplexScalarField, SpinorField, C64};
use crate::grid::Grid2D;
use crate::medium::CavityMedium;
use crate::spectral::Fft2;

use super::{implicit::CrankNicolson, ComplexPotential, PropagatorConfig, Scheme};

/// Strang splitting: kinetic half step, potential full step, kinetic half step.
#[derive(Debug)]
pub struct SplitStep {
    grid: Grid2D,
    fft: Fft2,
    kinetic: Vec<C64>,
    potential: Vec<C64>,
}

impl SplitStep {
    pub fn new(pot: &ComplexPotential, medium: &CavityMedium, cfg: &PropagatorConfig) -> Result<Self> {
        let grid = *pot.grid();
        grid.require_spectral()?;
        cfg.validate(pot)?;
        let dt = cfg.dt;
        let mk = medium.kinetic_mass();
        let (kx, ky) = (grid.kxs(), grid.kys());
        let mut kinetic = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let k2 = kx[i] * kx[i] + ky[j] * ky[j];
                kinetic.push(C64::from_polar(1.0, -k2 * dt / (4.0 * mk)));
            }
        }
        let potential = (0..grid.len())
            .map(|idx| {
                let decay = (pot.loss_rate + cfg.boundary.absorption(&grid, idx)) * dt;
                C64::from_polar((-decay).exp(), -pot.v_real.values()[idx] * dt)
            })
            .collect();
        Ok(Self { grid, fft: Fft2::new(grid.nx(), grid.ny()), kinetic, potential })
    }

    pub fn step(&self, values: &mut [C64]) {
        self.kinetic_half(values);
        for (v, p) in values.iter_mut().zip(&self.potential) {
            *v *= p;
        }
        self.kinetic_half(values);
    }

    fn kinetic_half(&self, values: &mut [C64]) {
        self.fft.forward(values);
        for (v, k) in values.iter_mut().zip(&self.kinetic) {
            *v *= k;
        }
        self.fft.inverse(values);
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
}

enum Stepper {
    Split(SplitStep),
    Implicit(CrankNicolson),
}

impl Stepper {
    fn new(pot: &ComplexPotential, medium: &CavityMedium, cfg: &PropagatorConfig) -> Result<Self> {
        Ok(match cfg.scheme {
            Scheme::SplitStepSpectral => Stepper::Split(SplitStep::new(pot, medium, cfg)?),
            Scheme::ImplicitMidpoint => Stepper::Implicit(CrankNicolson::new(pot, medium, cfg)?),
        })
    }

    fn step(&self, values: &mut Vec<C64>) -> Result<()> {
        match self {
            Stepper::Split(s) => {
                s.step(values);
                Ok(())
            }
            Stepper::Implicit(c) => {
                *values = c.step(values)?;
                Ok(())
            }
        }
    }
}

fn check_finite(values: &[C64], step: usize) -> Result<()> {
    if values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { step })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: ComplexScalarField,
}

/// Advance `n_steps` with the configured scheme.
pub fn propagate(
    psi: &ComplexScalarField,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
) -> Result<ComplexScalarField> {
    psi.grid().ensure_same(pot.grid())?;
    let stepper = Stepper::new(pot, medium, cfg)?;
    let mut values = psi.values().to_vec();
    for step in 1..=n_steps {
        stepper.step(&mut values)?;
        check_finite(&values, step)?;
    }
    ComplexScalarField::new(*psi.grid(), values)
}

/// Snapshots at steps `0, stride, 2 stride, ...` and at `n_steps`.
pub fn propagate_snapshots(
    psi: &ComplexScalarField,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
    stride: usize,
) -> Result<Vec<Snapshot>> {
    if stride == 0 {
        return Err(Error::config("snapshot stride must be >= 1"));
    }
    psi.grid().ensure_same(pot.grid())?;
    let stepper = Stepper::new(pot, medium, cfg)?;
    let grid = *psi.grid();
    let mut values = psi.values().to_vec();
    let mut out = vec![Snapshot { step: 0, t: 0.0, field: psi.clone() }];
    for step in 1..=n_steps {
        stepper.step(&mut values)?;
        check_finite(&values, step)?;
        if step % stride == 0 || step == n_steps {
            out.push(Snapshot { step, t: step as f64 * cfg.dt, field: ComplexScalarField::new(grid, values.clone())? });
        }
    }
    Ok(out)
}

pub fn split_step_propagate(
    psi: &ComplexScalarField,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
) -> Result<ComplexScalarField> {
    let cfg = PropagatorConfig { scheme: Scheme::SplitStepSpectral, ..*cfg };
    propagate(psi, pot, medium, &cfg, n_steps)
}

/// The Pauli equation is diagonal in spin, so each component evolves alone.
pub fn pauli_propagate(
    spinor: &SpinorField,
    pot: &ComplexPotential,
    medium: &CavityMedium,
    cfg: &PropagatorConfig,
    n_steps: usize,
) -> Result<SpinorField> {
    let (a, b) = spinor.components();
    let a = propagate(a, pot, medium, cfg, n_steps)?;
    let b = propagate(b, pot, medium, cfg, n_steps)?;
    SpinorField::new(a, b, spinor.basis())
}
