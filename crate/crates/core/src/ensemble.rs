//! Random-phase ensemble averaging of quadratic functionals of the real field
//! `E_delta = F e^{i delta} + c.c.`

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::warning::Warning;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DelayDistribution {
    /// Uniform on `[0, 2 pi)`.
    Uniform,
    PointMass { delta: f64 },
    /// Discrete distribution over `deltas` with probabilities `weights`.
    Tabulated { deltas: Vec<f64>, weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEnsembleSpec {
    pub distribution: DelayDistribution,
    pub samples: usize,
    pub seed: u64,
}

impl Default for PulseEnsembleSpec {
    fn default() -> Self {
        Self { distribution: DelayDistribution::Uniform, samples: 1000, seed: 0 }
    }
}

impl PulseEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(Error::config("ensemble needs at least one sample"));
        }
        if let DelayDistribution::Tabulated { deltas, weights } = &self.distribution {
            if deltas.is_empty() || deltas.len() != weights.len() {
                return Err(Error::config("tabulated delays and weights must be non-empty and of equal length"));
            }
            if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::config("tabulated weights must be non-negative"));
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::config(format!("tabulated weights sum to {total}, not 1")));
            }
        }
        Ok(())
    }

    /// The delays used by the average, deterministic in `seed`.
    pub fn draw(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match &self.distribution {
            DelayDistribution::Uniform => (0..self.samples).map(|_| rng.gen::<f64>() * TAU).collect(),
            DelayDistribution::PointMass { delta } => vec![*delta; self.samples],
            DelayDistribution::Tabulated { deltas, weights } => (0..self.samples)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (d, w) in deltas.iter().zip(weights) {
                        acc += w;
                        if u < acc {
                            return *d;
                        }
                    }
                    *deltas.last().unwrap()
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseAverage {
    pub mean: f64,
    /// Monte Carlo standard error of the mean.
    pub std_error: f64,
    pub samples: usize,
    pub warnings: Vec<Warning>,
}

/// Average `functional(real components)` over the delay ensemble, where each
/// real component is `2 Re[F_j e^{i delta}]`.
pub fn phase_average(
    snapshot: &[C64],
    functional: impl Fn(&[f64]) -> f64,
    ensemble: &PulseEnsembleSpec,
) -> Result<PhaseAverage> {
    ensemble.validate()?;
    let deltas = ensemble.draw();
    Ok(average_with(snapshot, &functional, &deltas, ensemble))
}

/// Pointwise [`phase_average`] over a field: `components[j][p]` is component
/// `j` at point `p`. The same delays are used at every point.
pub fn phase_average_field(
    components: &[&[C64]],
    functional: impl Fn(&[f64]) -> f64,
    ensemble: &PulseEnsembleSpec,
) -> Result<Vec<PhaseAverage>> {
    ensemble.validate()?;
    let n = components.first().map_or(0, |c| c.len());
    if components.iter().any(|c| c.len() != n) {
        return Err(Error::GridMismatch("ensemble components differ in length".into()));
    }
    let deltas = ensemble.draw();
    let mut point = vec![C64::new(0.0, 0.0); components.len()];
    Ok((0..n)
        .map(|p| {
            for (slot, c) in point.iter_mut().zip(components) {
                *slot = c[p];
            }
            average_with(&point, &functional, &deltas, ensemble)
        })
        .collect())
}

fn average_with(
    snapshot: &[C64],
    functional: &impl Fn(&[f64]) -> f64,
    deltas: &[f64],
    ensemble: &PulseEnsembleSpec,
) -> PhaseAverage {
    let mut real = vec![0.0; snapshot.len()];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for &d in deltas {
        let phase = C64::from_polar(1.0, d);
        for (r, a) in real.iter_mut().zip(snapshot) {
            *r = 2.0 * (a * phase).re;
        }
        let v = functional(&real);
        sum += v;
        sum_sq += v * v;
    }
    let n = deltas.len() as f64;
    let mean = sum / n;
    let std_error = if deltas.len() > 1 {
        ((sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let mut warnings = Vec::new();
    if deltas.len() < 2 && !matches!(ensemble.distribution, DelayDistribution::PointMass { .. }) {
        warnings.push(Warning::new("ensemble-undersampled", "fewer than two delays drawn; no error estimate"));
    }
    PhaseAverage { mean, std_error, samples: deltas.len(), warnings }
}
