use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{C64, I};

type ReflectivityFn = Arc<dyn Fn(f64, C64) -> C64 + Send + Sync>;

/// Mirror reflectivity `r = |r| e^{i delta}`, optionally replaced by a
/// general `r(omega, kx)` for the Newton refinement.
#[derive(Clone)]
pub struct ReflectivityModel {
    pub magnitude: f64,
    pub phase: f64,
    /// Explicit transmission; `None` means `sqrt(1 - |r|^2)`.
    pub transmission: Option<C64>,
    function: Option<ReflectivityFn>,
}

impl fmt::Debug for ReflectivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReflectivityModel")
            .field("magnitude", &self.magnitude)
            .field("phase", &self.phase)
            .field("transmission", &self.transmission)
            .field("function", &self.function.is_some())
            .finish()
    }
}

impl ReflectivityModel {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        let m = Self { magnitude, phase, transmission: None, function: None };
        m.validate()?;
        Ok(m)
    }

    /// `r = -(1 - eta)`, the mirror used throughout the leaky-wave analysis.
    pub fn from_eta(eta: f64) -> Result<Self> {
        Self::new(1.0 - eta, PI)
    }

    pub fn with_transmission(mut self, t: C64) -> Self {
        self.transmission = Some(t);
        self
    }

    /// Attach a general `r(omega, kx)`; the constant part is kept as the
    /// starting guess.
    pub fn with_function(mut self, f: impl Fn(f64, C64) -> C64 + Send + Sync + 'static) -> Self {
        self.function = Some(Arc::new(f));
        self
    }

    pub fn is_constant(&self) -> bool {
        self.function.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if self.magnitude == 0.0 {
            return Err(Error::NoMode("|r| = 0 leaves no cavity resonance".into()));
        }
        if !(self.magnitude.is_finite() && self.magnitude > 0.0 && self.magnitude <= 1.0) {
            return Err(Error::config(format!("|r| must lie in (0, 1], got {}", self.magnitude)));
        }
        if !self.phase.is_finite() {
            return Err(Error::config("reflection phase must be finite"));
        }
        Ok(())
    }

    /// Constant part `|r| e^{i delta}`.
    pub fn r0(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }

    pub fn r(&self, omega: f64, kx: C64) -> C64 {
        match &self.function {
            Some(f) => f(omega, kx),
            None => self.r0(),
        }
    }

    pub fn t(&self, omega: f64, kx: C64) -> C64 {
        match self.transmission {
            Some(t) => t,
            None => C64::new((1.0 - self.r(omega, kx).norm_sqr()).max(0.0).sqrt(), 0.0),
        }
    }
}

/// Root of `1 + r e^{2 i kz D} = 0` on branch `q` for the constant part of `r`:
/// `kz = (q + 1/2) pi / D - delta / (2D) + i ln|r| / (2D)`.
pub fn fabry_perot_mode(model: &ReflectivityModel, d: f64, q: u32) -> Result<C64> {
    model.validate()?;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::config(format!("cavity thickness must be positive, got {d}")));
    }
    let re = (q as f64 + 0.5) * PI / d - model.phase / (2.0 * d);
    Ok(C64::new(re, model.magnitude.ln() / (2.0 * d)))
}

/// Small-`eta` form for `r = -(1 - eta)`: `q pi / D - i eta / (2D)`.
pub fn fabry_perot_mode_expansion(eta: f64, d: f64, q: u32) -> C64 {
    C64::new(q as f64 * PI / d, -eta / (2.0 * d))
}

/// Newton iteration on `1 + r(omega, kx(kz)) e^{2 i kz D}` with
/// `kx = sqrt(eps omega^2 - kz^2)`, started from `kz0`.
pub fn refine_mode(model: &ReflectivityModel, omega: f64, eps_real: f64, d: f64, kz0: C64) -> Result<C64> {
    let k2 = eps_real * omega * omega;
    let f = |kz: C64| 1.0 + model.r(omega, (k2 - kz * kz).sqrt()) * (2.0 * I * kz * d).exp();
    let mut kz = kz0;
    for _ in 0..100 {
        let fz = f(kz);
        if fz.norm() < 1e-14 {
            return Ok(kz);
        }
        let h = 1e-6 * kz.norm().max(1.0 / d);
        let df = (f(kz + h) - f(kz - h)) / (2.0 * h);
        if df.norm() == 0.0 || !df.is_finite() {
            break;
        }
        let step = fz / df;
        kz -= step;
        if step.norm() < 1e-15 * kz.norm().max(1.0) {
            return Ok(kz);
        }
    }
    let res = f(kz).norm();
    if res < 1e-10 {
        Ok(kz)
    } else {
        Err(Error::NoConvergence { iterations: 100, residual: res })
    }
}
