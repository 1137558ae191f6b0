//! Physical parameters of the planar microcavity.
//!
//! Natural units with hbar = c = 1: lengths, energies, rates and the
//! effective mass are all measured in the same (inverse-length) scale.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::warning::{GuardConfig, Warning};

/// `m = q pi / (sqrt(eps') D0)`: rest energy of the in-plane photon for
/// longitudinal mode order `q` between mirrors spaced by `d0`.
pub fn effective_mass(q: u32, d0: f64, eps_real: f64) -> f64 {
    q as f64 * PI / (eps_real.sqrt() * d0)
}

/// Mirror spacing that yields effective mass `mass` at mode order `q`.
pub fn spacing_for_mass(mass: f64, q: u32, eps_real: f64) -> f64 {
    q as f64 * PI / (eps_real.sqrt() * mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMedium {
    pub eps_real: f64,
    pub eps_imag: f64,
    pub mass: f64,
    pub d0: f64,
    pub q: u32,
    /// Radiative (leakage) rate.
    pub gamma: f64,
    /// d(omega eps')/d(omega), the electric energy weight.
    pub g_e: f64,
    /// d(omega mu')/d(omega), the magnetic energy weight.
    pub g_b: f64,
}

impl CavityMedium {
    /// Medium from mirror geometry; the effective mass is derived.
    pub fn from_geometry(eps_real: f64, eps_imag: f64, q: u32, d0: f64, gamma: f64) -> Result<Self> {
        check_positive("eps_real", eps_real)?;
        check_positive("d0", d0)?;
        if q < 1 {
            return Err(Error::config("mode order q must be >= 1"));
        }
        let medium = Self {
            eps_real,
            eps_imag,
            mass: effective_mass(q, d0, eps_real),
            d0,
            q,
            gamma,
            g_e: eps_real,
            g_b: 1.0,
        };
        medium.validate()?;
        Ok(medium)
    }

    /// Medium from the effective mass; the mirror spacing is derived.
    pub fn from_mass(eps_real: f64, eps_imag: f64, mass: f64, q: u32, gamma: f64) -> Result<Self> {
        check_positive("eps_real", eps_real)?;
        check_positive("mass", mass)?;
        if q < 1 {
            return Err(Error::config("mode order q must be >= 1"));
        }
        let medium = Self {
            eps_real,
            eps_imag,
            mass,
            d0: spacing_for_mass(mass, q, eps_real),
            q,
            gamma,
            g_e: eps_real,
            g_b: 1.0,
        };
        medium.validate()?;
        Ok(medium)
    }

    /// Override the dispersion factors (non-dispersive default: eps', 1).
    pub fn with_dispersion(mut self, g_e: f64, g_b: f64) -> Result<Self> {
        check_positive("g_e", g_e)?;
        check_positive("g_b", g_b)?;
        self.g_e = g_e;
        self.g_b = g_b;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("eps_real", self.eps_real)?;
        check_positive("mass", self.mass)?;
        check_positive("d0", self.d0)?;
        if !(self.eps_imag.is_finite() && self.eps_imag >= 0.0) {
            return Err(Error::config(format!("eps_imag must be >= 0, got {}", self.eps_imag)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::config(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if self.q < 1 {
            return Err(Error::config("mode order q must be >= 1"));
        }
        let derived = effective_mass(self.q, self.d0, self.eps_real);
        if (derived - self.mass).abs() > 1e-9 * self.mass {
            return Err(Error::config(format!(
                "mass {} inconsistent with q = {}, d0 = {} (expected {})",
                self.mass, self.q, self.d0, derived
            )));
        }
        Ok(())
    }

    /// Population decay rate `Gamma + m eps''/eps'` of the 2D dynamics.
    pub fn loss_rate(&self) -> f64 {
        self.gamma + self.mass * self.eps_imag / self.eps_real
    }

    /// Imaginary part of the effective potential, `Gamma/2 + m eps''/(2 eps')`.
    pub fn amplitude_loss_rate(&self) -> f64 {
        0.5 * self.loss_rate()
    }

    /// `eps' m`, the mass appearing in the kinetic term and guidance law.
    pub fn kinetic_mass(&self) -> f64 {
        self.eps_real * self.mass
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma == 0.0 && self.eps_imag == 0.0
    }

    /// Soft paraxial checks on the medium itself.
    pub fn guard_warnings(&self, guards: &GuardConfig) -> Vec<Warning> {
        let mut out = Vec::new();
        let tangent = self.eps_imag / self.eps_real;
        if tangent > guards.loss_tangent {
            out.push(
                Warning::new(
                    "loss-tangent",
                    format!("eps''/eps' = {tangent:.3e} exceeds {}", guards.loss_tangent),
                )
                .with_value(tangent),
            );
        }
        let depth = self.gamma * self.d0;
        if depth > guards.leakage_depth {
            out.push(
                Warning::new(
                    "leakage-depth",
                    format!(
                        "Gamma*D0 = {depth:.3e} exceeds {}; linearised mode profile degrades",
                        guards.leakage_depth
                    ),
                )
                .with_value(depth),
            );
        }
        out
    }

    /// Guard on the carrier detuning `E/m`.
    pub fn energy_warning(&self, energy: f64, guards: &GuardConfig) -> Option<Warning> {
        let ratio = energy.abs() / self.mass;
        (ratio > guards.energy_ratio).then(|| {
            Warning::new("energy-ratio", format!("|E|/m = {ratio:.3e} exceeds {}", guards.energy_ratio))
                .with_value(ratio)
        })
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be > 0, got {value}")))
    }
}
