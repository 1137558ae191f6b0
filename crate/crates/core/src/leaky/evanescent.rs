use crate::error::{Error, Result};

/// Planar Bohmian speed of a lossy evanescent wave, `Gamma / (2 sqrt(2 m |Delta|))`.
pub fn evanescent_velocity(gamma: f64, mass: f64, detuning: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::config(format!("Gamma must be >= 0, got {gamma}")));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::config(format!("mass must be positive, got {mass}")));
    }
    if !(detuning.is_finite() && detuning < 0.0) {
        return Err(Error::WrongBranch(format!("evanescent regime needs Delta < 0, got {detuning}")));
    }
    Ok(gamma / (2.0 * (2.0 * mass * detuning.abs()).sqrt()))
}

/// Conversion to SI for laboratory parameters. With `hbar = c = 1` every
/// rate, energy and mass becomes an inverse length.
pub mod si {
    use std::f64::consts::PI;

    use crate::error::{Error, Result};

    pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
    /// `hbar c` in eV m.
    pub const HBAR_C_EV_M: f64 = 197.326_980_4e-9;

    /// Rate `1 / (c tau)` in 1/m.
    pub fn rate_from_lifetime(lifetime_s: f64) -> f64 {
        1.0 / (SPEED_OF_LIGHT * lifetime_s)
    }

    /// `E / (hbar c)` in 1/m.
    pub fn wavenumber_from_energy(energy_ev: f64) -> f64 {
        energy_ev / HBAR_C_EV_M
    }

    /// Photon mass `2 pi / lambda` in 1/m.
    pub fn mass_from_wavelength(wavelength_m: f64) -> f64 {
        2.0 * PI / wavelength_m
    }

    /// Evanescent speed in m/s from a photon lifetime, a (negative) detuning
    /// in eV and the optical wavelength in the cavity.
    pub fn evanescent_velocity_si(lifetime_s: f64, detuning_ev: f64, wavelength_m: f64) -> Result<f64> {
        if !(lifetime_s > 0.0 && wavelength_m > 0.0) {
            return Err(Error::config("lifetime and wavelength must be positive"));
        }
        let v = super::evanescent_velocity(
            rate_from_lifetime(lifetime_s),
            mass_from_wavelength(wavelength_m),
            wavenumber_from_energy(detuning_ev),
        )?;
        Ok(v * SPEED_OF_LIGHT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_is_static_and_scaling() {
        assert_eq!(evanescent_velocity(0.0, 1.0, -0.1).unwrap(), 0.0);
        let a = evanescent_velocity(1e-3, 1.0, -0.1).unwrap();
        let b = evanescent_velocity(1e-3, 1.0, -0.2).unwrap();
        assert!((a / b - 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(evanescent_velocity(1e-3, 1.0, 0.0), Err(Error::WrongBranch(_))));
    }

    #[test]
    fn laboratory_figure() {
        let v = si::evanescent_velocity_si(270e-12, -0.04e-3, 600e-9).unwrap();
        assert!((v - 2.84e4).abs() < 0.01e4, "{v}");
    }
}
