use serde::Serialize;

use crate::bohm::{continuity_residual, pauli_velocity, scalar_velocity};
use crate::error::Result;
use crate::field::{ComplexScalarField, RealField};
use crate::medium::CavityMedium;
use crate::spectral::DerivativeMethod;
use crate::warning::{GuardConfig, Warning};

use super::energy::z_average_fields;
use super::fields::{reconstruct_fields, ReconstructionOptions};
use super::{PlanarSource, ZGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub method: DerivativeMethod,
    pub longitudinal: bool,
    pub include_grad_v: bool,
    /// Points eligible for the audit (e.g. outside an absorbing layer).
    pub include: Option<Vec<bool>>,
    pub guards: GuardConfig,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            method: DerivativeMethod::Spectral,
            longitudinal: true,
            include_grad_v: false,
            include: None,
            guards: GuardConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalencePoint {
    pub x: f64,
    pub y: f64,
    /// `|<v>_xy - v_guidance| / |v_guidance|`.
    pub dev_planar: f64,
    pub v_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    #[serde(skip)]
    pub points: Vec<EquivalencePoint>,
    pub audited_points: usize,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
    pub max: f64,
    pub vz_mean: f64,
    /// `Gamma D0 / 2`.
    pub vz_expected: f64,
    pub vz_deviation: f64,
    pub vz_max_deviation: f64,
    /// Mean planar speed of the guidance field over audited points.
    pub mean_guidance_speed: f64,
    /// `int W dz / int u dz`, to compare with `m eps''/eps'`.
    pub ohmic_rate: f64,
    pub ohmic_rate_expected: f64,
    /// Largest relative size of the neglected `grad V` term in B.
    pub grad_v_term: f64,
    pub warnings: Vec<Warning>,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Compare the z-averaged energy velocity with the guidance velocity of the
/// same wavefunction, and its vertical part with `Gamma D0 / 2`.
pub fn equivalence_audit(
    source: &PlanarSource,
    v: Option<&RealField>,
    medium: &CavityMedium,
    zgrid: &ZGrid,
    options: &AuditOptions,
) -> Result<EquivalenceReport> {
    let recon = ReconstructionOptions {
        method: options.method,
        longitudinal: options.longitudinal,
        include_grad_v: options.include_grad_v,
        t: 0.0,
    };
    let (fields, warnings) = reconstruct_fields(source, v, medium, zgrid, &recon, &options.guards)?;
    let zavg = z_average_fields(&fields);
    let guidance = match source {
        PlanarSource::Scalar { psi, .. } => scalar_velocity(psi, medium, options.method)?,
        PlanarSource::Spinor(s) => pauli_velocity(s, medium, options.method)?.total,
    };
    let grid = *source.grid();
    let mut points = Vec::new();
    let mut speed_sum = 0.0;
    for idx in 0..grid.len() {
        if !(guidance.mask[idx] && zavg.planar.mask[idx] && options.include.as_ref().map_or(true, |m| m[idx])) {
            continue;
        }
        let (bx, by) = (guidance.vx[idx], guidance.vy[idx]);
        let (ax, ay) = (zavg.planar.vx[idx], zavg.planar.vy[idx]);
        let diff = (ax - bx).hypot(ay - by);
        let speed = bx.hypot(by);
        speed_sum += speed;
        let dev = if diff == 0.0 { 0.0 } else { diff / speed };
        let (x, y) = grid.coords(idx);
        points.push(EquivalencePoint { x, y, dev_planar: dev, v_z: zavg.vz[idx] });
    }
    let mut devs: Vec<f64> = points.iter().map(|p| p.dev_planar).collect();
    devs.sort_by(f64::total_cmp);
    let n = points.len().max(1) as f64;
    let vz_expected = 0.5 * medium.gamma * medium.d0;
    let vz_mean = points.iter().map(|p| p.v_z).sum::<f64>() / n;
    let rel = |x: f64| if vz_expected == 0.0 { x.abs() } else { (x - vz_expected).abs() / vz_expected };
    let vz_max_deviation = points.iter().map(|p| rel(p.v_z)).fold(0.0, f64::max);
    let (w_sum, u_sum) = zavg.w_int.iter().zip(&zavg.u_int).fold((0.0, 0.0), |(a, b), (w, u)| (a + w, b + u));
    Ok(EquivalenceReport {
        audited_points: points.len(),
        p50: percentile(&devs, 0.5),
        p90: percentile(&devs, 0.9),
        p99: percentile(&devs, 0.99),
        max: devs.last().copied().unwrap_or(0.0),
        vz_mean,
        vz_expected,
        vz_deviation: rel(vz_mean),
        vz_max_deviation,
        mean_guidance_speed: speed_sum / n,
        ohmic_rate: if u_sum > 0.0 { w_sum / u_sum } else { 0.0 },
        ohmic_rate_expected: medium.mass * medium.eps_imag / medium.eps_real,
        grad_v_term: fields.grad_v_diagnostic(),
        warnings,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationReport {
    pub residual_l2: f64,
    pub residual_linf: f64,
    pub norm_ratio: f64,
    pub expected_ratio: f64,
    pub norm_ratio_error: f64,
}

/// Discrete check of `d rho/dt + div(rho v) + (Gamma + m eps''/eps') rho = 0`
/// between two snapshots of one run, plus the global decay law.
pub fn conservation_audit(
    psi0: &ComplexScalarField,
    psi1: &ComplexScalarField,
    dt: f64,
    medium: &CavityMedium,
    method: DerivativeMethod,
    include: Option<&[bool]>,
) -> Result<ConservationReport> {
    let r = continuity_residual(psi0, psi1, dt, medium, method, include)?;
    Ok(ConservationReport {
        residual_l2: r.l2,
        residual_linf: r.linf,
        norm_ratio: r.norm_ratio,
        expected_ratio: r.expected_ratio,
        norm_ratio_error: r.norm_ratio_error(),
    })
}
