use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{C64, I};
use crate::medium::CavityMedium;

use super::ReflectivityModel;

/// Leaky pole of the cavity reflectivity at energy `E = omega - m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakyModeParams {
    pub energy: f64,
    pub omega: f64,
    pub eps_real: f64,
    /// Cavity thickness.
    pub d: f64,
    pub xi: C64,
    pub kx: C64,
    pub kz: C64,
    /// `d(r e^{2 i kz D})/dkx` at the pole, `2 i D kx / kz`.
    pub denominator: C64,
}

/// First-order pole in the small parameters `E/m`, `Gamma/m`, `eps''/eps'`.
pub fn pole_parameters(energy: f64, medium: &CavityMedium) -> Result<LeakyModeParams> {
    medium.validate()?;
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::WrongBranch(format!(
            "pole needs E > 0, got {energy}; below cutoff use the evanescent branch"
        )));
    }
    let (m, ep) = (medium.mass, medium.eps_real);
    let loss = medium.loss_rate();
    let root = (2.0 * m * energy).sqrt();
    let xi = C64::new((2.0 * energy / m).sqrt(), ep.sqrt() * loss / (2.0 * root));
    let k0 = (2.0 * m * ep * energy).sqrt();
    let kx = C64::new(k0, m * ep * loss / (2.0 * k0));
    let kz = ep.sqrt() * C64::new(m, -0.5 * medium.gamma);
    let p = LeakyModeParams {
        energy,
        omega: m + energy,
        eps_real: ep,
        d: medium.d0,
        xi,
        kx,
        kz,
        denominator: 2.0 * I * medium.d0 * kx / kz,
    };
    p.check_signs()?;
    Ok(p)
}

impl LeakyModeParams {
    /// Leaky-wave signature: decay along +x, growth along +z.
    /// Each strict sign is required only when the matching loss is present.
    pub fn check_signs(&self) -> Result<()> {
        let ok = self.kx.re > 0.0 && self.kz.re > 0.0 && self.kx.im >= 0.0 && self.kz.im <= 0.0;
        if !ok {
            return Err(Error::WrongBranch(format!(
                "pole kx = {}, kz = {} violates Im kx >= 0, Im kz <= 0",
                self.kx, self.kz
            )));
        }
        Ok(())
    }

    /// True for the strict leaky signature `Im kx > 0`, `Im kz < 0`.
    pub fn is_leaky(&self) -> bool {
        self.kx.im > 0.0 && self.kz.im < 0.0
    }

    /// Relative mismatch of `(kx, kz)` against `omega sqrt(eps') (sin xi, cos xi)`.
    pub fn consistency(&self) -> (f64, f64) {
        let k = self.omega * self.eps_real.sqrt();
        let sx = k * self.xi.sin();
        let cz = k * self.xi.cos();
        ((self.kx - sx).norm() / self.kx.norm(), (self.kz - cz).norm() / self.kz.norm())
    }
}

/// Line current `I0` at height `d` above the `z = 0` mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub i0: f64,
    pub d: f64,
}

impl SourceSpec {
    pub fn validate(&self, cavity: f64) -> Result<()> {
        if !(self.i0.is_finite() && self.d.is_finite() && self.d > 0.0) {
            return Err(Error::config("source needs finite I0 and d > 0"));
        }
        if self.d / cavity > 0.05 {
            return Err(Error::config(format!("source height d/D = {} exceeds 0.05", self.d / cavity)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakyFieldValue {
    pub value: C64,
    /// False when the point lies inside every excluded angular sector.
    pub valid: bool,
}

/// Pole contribution `Phi_P(x, z)` for `z >= d`, with its angular cutoffs
/// `|phi| > Re xi` (direct wave) and `|phi_bar| > Re xi` (mirror wave).
pub fn leaky_field(
    params: &LeakyModeParams,
    source: &SourceSpec,
    model: &ReflectivityModel,
    x: f64,
    z: f64,
) -> Result<LeakyFieldValue> {
    source.validate(params.d)?;
    if z < source.d {
        return Err(Error::config(format!("pole field needs z >= d = {}, got {z}", source.d)));
    }
    let cut = params.xi.re;
    let (kx, kz, dd) = (params.kx, params.kz, params.d);
    let direct = x.atan2(z).abs() > cut;
    let f = if z <= dd {
        let mirror = x.atan2(dd - z).abs() > cut;
        if !(direct || mirror) {
            return Ok(LeakyFieldValue { value: C64::new(0.0, 0.0), valid: false });
        }
        let r = model.r(params.omega, kx);
        let mut f = C64::new(0.0, 0.0);
        if direct {
            f += (I * kz * z).exp();
        }
        if mirror {
            f += r * (2.0 * I * kz * dd).exp() * (-I * kz * z).exp();
        }
        f
    } else {
        if !direct {
            return Ok(LeakyFieldValue { value: C64::new(0.0, 0.0), valid: false });
        }
        model.t(params.omega, kx) * (I * kz * z).exp()
    };
    let amp = -params.omega * source.i0 * source.d * (I * kx * x.abs()).exp() / params.denominator;
    Ok(LeakyFieldValue { value: amp * f, valid: true })
}
