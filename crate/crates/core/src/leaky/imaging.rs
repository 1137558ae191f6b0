use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{C64, I};
use crate::warning::Warning;

/// Ideal microscope: numerical aperture, magnification and overall constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImagingSetup {
    pub na: f64,
    pub magnification: f64,
    #[serde(default = "one")]
    pub a: f64,
}

fn one() -> f64 {
    1.0
}

impl ImagingSetup {
    pub fn new(na: f64, magnification: f64) -> Self {
        Self { na, magnification, a: 1.0 }
    }

    pub fn validate(&self, eps_real: f64) -> Result<Vec<Warning>> {
        if !(self.na.is_finite() && self.na > 0.0) {
            return Err(Error::config(format!("NA must be positive, got {}", self.na)));
        }
        if !(self.magnification.is_finite() && self.magnification > 0.0) {
            return Err(Error::config(format!("magnification must be positive, got {}", self.magnification)));
        }
        let mut w = Vec::new();
        if self.na >= eps_real.sqrt() {
            w.push(
                Warning::new("band-edge", format!("NA = {} reaches the medium index {}", self.na, eps_real.sqrt()))
                    .with_value(self.na),
            );
        }
        Ok(w)
    }
}

/// Uniformly sampled 1D field, `x_j = x0 + j dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLine {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<C64>,
}

impl SampledLine {
    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> C64) -> Self {
        Self { x0, dx, values: (0..n).map(|j| f(x0 + j as f64 * dx)).collect() }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }
}

/// `sin(omega NA u) / (pi u)`, with value `omega NA / pi` at `u = 0`.
pub fn psf(u: f64, omega: f64, na: f64) -> f64 {
    let k = omega * na;
    if (k * u).abs() < 1e-8 {
        k / PI
    } else {
        (k * u).sin() / (PI * u)
    }
}

/// `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageResult {
    pub x_out: Vec<f64>,
    /// Band-limited spectral route.
    pub spectral: Vec<C64>,
    /// Real-space PSF convolution route.
    pub convolution: Vec<C64>,
    /// Relative L2 distance between the two routes.
    pub agreement: f64,
    pub warnings: Vec<Warning>,
}

const GL_ORDER: usize = 16;

/// Image-plane field of a 1D object field, by spectral filtering over
/// `|kx| <= omega NA` and by convolution with the PSF.
pub fn image_field(line: &SampledLine, setup: &ImagingSetup, omega: f64, eps_real: f64, x_out: &[f64]) -> Result<ImageResult> {
    let mut warnings = setup.validate(eps_real)?;
    let n = line.values.len();
    if n < 2 || !(line.dx > 0.0) {
        return Err(Error::config("object field needs at least two samples and dx > 0"));
    }
    let peak = line.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = line.values[0].norm().max(line.values[n - 1].norm());
    if edge > 1e-6 * peak {
        warnings.push(
            Warning::new("undecayed-edges", "object field has not decayed to 1e-6 of its peak at the window edges")
                .with_value(edge / peak),
        );
    }
    let m = setup.magnification;
    let k_max = omega * setup.na;

    // Spectral route: DTFT of the samples, composite Gauss-Legendre in kx.
    let reach = (0..n).map(|j| line.x(j).abs()).fold(0.0, f64::max) + x_out.iter().map(|x| (x / m).abs()).fold(0.0, f64::max);
    let panels = ((k_max * reach / 2.0).ceil() as usize).max(1);
    let (gx, gw) = gauss_legendre(GL_ORDER);
    let h = 2.0 * k_max / panels as f64;
    let mut ks = Vec::with_capacity(panels * GL_ORDER);
    let mut ws = Vec::with_capacity(panels * GL_ORDER);
    for p in 0..panels {
        let mid = -k_max + (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            ks.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    let spectrum: Vec<C64> = ks
        .iter()
        .map(|&k| {
            let s: C64 = line.values.iter().enumerate().map(|(j, v)| v * (-I * k * line.x(j)).exp()).sum();
            s * line.dx / (2.0 * PI)
        })
        .collect();
    let spectral: Vec<C64> = x_out
        .iter()
        .map(|&xo| setup.a * ks.iter().zip(&ws).zip(&spectrum).map(|((k, w), s)| w * s * (-I * k * xo / m).exp()).sum::<C64>())
        .collect();

    let convolution: Vec<C64> = x_out
        .iter()
        .map(|&xo| {
            setup.a
                * line.dx
                * line.values.iter().enumerate().map(|(j, v)| v * psf(line.x(j) + xo / m, omega, setup.na)).sum::<C64>()
        })
        .collect();

    let num: f64 = spectral.iter().zip(&convolution).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = convolution.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    let agreement = if den == 0.0 { num } else { num / den };
    Ok(ImageResult { x_out: x_out.to_vec(), spectral, convolution, agreement, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 31] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n = {n}, deg = {deg}: {q}");
            }
        }
    }

    #[test]
    fn psf_limit() {
        assert_eq!(psf(0.0, 2.0, 0.5), 1.0 / PI);
        assert!((psf(1e-6, 2.0, 0.5) - 1.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn magnified_gaussian() {
        let line = SampledLine::from_fn(-20.0, 0.05, 801, |x| C64::new((-(x - 3.0) * (x - 3.0) / 2.0).exp(), 0.0));
        let setup = ImagingSetup::new(0.9, 5.0);
        let xo: Vec<f64> = (0..301).map(|i| -30.0 + i as f64 * 0.1).collect();
        let img = image_field(&line, &setup, 10.0, 1.0, &xo).unwrap();
        assert!(img.agreement < 1e-8, "{}", img.agreement);
        let (imax, _) = img.convolution.iter().enumerate().fold((0, 0.0), |b, (i, v)| if v.norm() > b.1 { (i, v.norm()) } else { b });
        assert!((xo[imax] + 15.0).abs() < 0.11);
        assert!(img.warnings.is_empty());
    }

    #[test]
    fn band_edge_and_bad_setup() {
        assert_eq!(ImagingSetup::new(1.0, 1.0).validate(1.0).unwrap()[0].code, "band-edge");
        assert!(ImagingSetup::new(0.0, 1.0).validate(1.0).is_err());
    }
}
