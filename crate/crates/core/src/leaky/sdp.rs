use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{C64, I};
use crate::medium::CavityMedium;

use super::{ReflectivityModel, SourceSpec};

/// Smallest `omega sqrt(eps') rho` for which the Hankel asymptotics are used.
pub const ASYMPTOTIC_GUARD: f64 = 10.0;

/// Cavity-field spectrum `(i omega I0 d / 2 pi) / (1 + r e^{2 i kz D})` at real `kx`.
pub fn cavity_spectrum(kx: f64, omega: f64, medium: &CavityMedium, model: &ReflectivityModel, source: &SourceSpec) -> C64 {
    let kz = C64::new(omega * omega * medium.eps_real - kx * kx, 0.0).sqrt();
    let r = model.r(omega, kx.into());
    let pref = I * omega * source.i0 * source.d / (2.0 * PI);
    pref / (1.0 + r * (2.0 * I * kz * medium.d0).exp())
}

/// `H0(s) ~ sqrt(2 / (pi s)) e^{i (s - pi/4)}`.
pub fn hankel0_asymptotic(s: f64) -> C64 {
    (2.0 / (PI * s)).sqrt() * C64::from_polar(1.0, s - 0.25 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldPoint {
    pub value: C64,
    pub rho: f64,
    pub phi: f64,
}

/// Steepest-descent (radiative) part of the line-source field at `(x, z)`,
/// `z >= d`. Inside the cavity it is the direct wave plus the wave reflected
/// by the top mirror; above it, the transmitted wave.
pub fn sdp_farfield(
    omega: f64,
    medium: &CavityMedium,
    source: &SourceSpec,
    model: &ReflectivityModel,
    x: f64,
    z: f64,
) -> Result<FarFieldPoint> {
    source.validate(medium.d0)?;
    model.validate()?;
    if z < source.d {
        return Err(Error::config(format!("far field is not modelled below the source (z = {z})")));
    }
    let k = omega * medium.eps_real.sqrt();
    let rho = x.hypot(z);
    let phi = x.atan2(z);
    let guard = |r: f64| {
        if k * r < ASYMPTOTIC_GUARD {
            Err(Error::AsymptoticInvalid(format!(
                "omega sqrt(eps') rho = {} is below {ASYMPTOTIC_GUARD}",
                k * r
            )))
        } else {
            Ok(())
        }
    };
    guard(rho)?;
    let wave = |angle: f64, r: f64| k * cavity_spectrum(k * angle.sin(), omega, medium, model, source) * angle.cos() * hankel0_asymptotic(k * r);
    let direct = wave(phi, rho);
    let value = if z <= medium.d0 {
        let zb = medium.d0 - z;
        let rho_b = x.hypot(zb);
        guard(rho_b)?;
        let phi_b = x.atan2(zb);
        let r_b = model.r(omega, (k * phi_b.sin()).into());
        direct + wave(phi_b, rho_b) * r_b * (I * k * phi_b.cos() * medium.d0).exp()
    } else {
        direct * model.t(omega, (k * phi.sin()).into())
    };
    Ok(FarFieldPoint { value, rho, phi })
}
