//! Loss-type Bell jumps. Along an equivariant trajectory the jump density
//! `(Gamma + m eps''/eps') |Psi|^2` reduces to the uniform per-particle rate
//! `Gamma + m eps''/eps'`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::medium::CavityMedium;

use super::trajectory::{Termination, Trajectory};

pub const MAX_STEP_PROBABILITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpProcess {
    pub rate: f64,
    pub seed: u64,
}

impl JumpProcess {
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::config(format!("jump rate must be >= 0, got {rate}")));
        }
        Ok(Self { rate, seed })
    }

    pub fn from_medium(medium: &CavityMedium, seed: u64) -> Self {
        Self { rate: medium.loss_rate(), seed }
    }

    /// Probability of a jump within `dt`: `1 - exp(-rate dt)`.
    pub fn step_probability(&self, dt: f64) -> f64 {
        -(-self.rate * dt).exp_m1()
    }

    /// Deterministic stream for trajectory `index`.
    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvent {
    pub trajectory: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub n: usize,
    pub rate: f64,
    pub t0: f64,
    pub times: Vec<f64>,
    pub fraction: Vec<f64>,
    /// 3-sigma Wilson interval.
    pub ci_lo: Vec<f64>,
    pub ci_hi: Vec<f64>,
    pub events: Vec<JumpEvent>,
}

impl SurvivalCurve {
    pub fn expected(&self, t: f64) -> f64 {
        (-self.rate * (t - self.t0)).exp()
    }

    /// Analytic 3-sigma binomial band around the exponential law at sample `k`.
    pub fn within_three_sigma(&self, k: usize) -> bool {
        let p = self.expected(self.times[k]);
        let sigma = (p * (1.0 - p) / self.n as f64).sqrt();
        (self.fraction[k] - p).abs() <= 3.0 * sigma
    }
}

/// Wilson score interval with `z` standard deviations.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn step_count(t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && dt > 0.0) || !(t1 > t0) {
        return Err(Error::config(format!("need dt > 0 and t1 > t0, got dt = {dt}, [{t0}, {t1}]")));
    }
    let n = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, (t1 - t0) / n as f64))
}

/// Survival of `n` independent trajectories under per-step jump probability
/// `1 - exp(-rate h)`, with `h <= dt` dividing `[t0, t1]` evenly.
pub fn bell_jump_ensemble(jump: &JumpProcess, n: usize, t0: f64, t1: f64, dt: f64) -> Result<SurvivalCurve> {
    if n < 1 {
        return Err(Error::config("ensemble needs at least one trajectory"));
    }
    let (steps, h) = step_count(t0, t1, dt)?;
    let p = jump.step_probability(h);
    if p > MAX_STEP_PROBABILITY {
        return Err(Error::TimeStepTooCoarse { probability: p });
    }
    // jumps_at[k]: trajectories that jumped during step k (1-based)
    let mut jumps_at = vec![0usize; steps + 1];
    let mut events = Vec::new();
    if p > 0.0 {
        for i in 0..n {
            let mut rng = jump.rng(i as u64);
            for k in 1..=steps {
                if rng.gen::<f64>() < p {
                    jumps_at[k] += 1;
                    events.push(JumpEvent { trajectory: i, t: t0 + k as f64 * h });
                    break;
                }
            }
        }
    }
    let mut alive = n;
    let mut times = Vec::with_capacity(steps + 1);
    let mut fraction = Vec::with_capacity(steps + 1);
    let mut ci_lo = Vec::with_capacity(steps + 1);
    let mut ci_hi = Vec::with_capacity(steps + 1);
    for (k, &jumped) in jumps_at.iter().enumerate() {
        alive -= jumped;
        times.push(t0 + k as f64 * h);
        fraction.push(alive as f64 / n as f64);
        let (lo, hi) = wilson_interval(alive, n, 3.0);
        ci_lo.push(lo);
        ci_hi.push(hi);
    }
    Ok(SurvivalCurve { n, rate: jump.rate, t0, times, fraction, ci_lo, ci_hi, events })
}

/// Cut a trajectory at its first sampled jump, using stream `index`.
pub fn interrupt_trajectory(traj: &Trajectory, jump: &JumpProcess, index: usize) -> Result<Trajectory> {
    let mut rng = jump.rng(index as u64);
    for (k, w) in traj.samples.windows(2).enumerate() {
        let p = jump.step_probability(w[1].t - w[0].t);
        if p > MAX_STEP_PROBABILITY {
            return Err(Error::TimeStepTooCoarse { probability: p });
        }
        if rng.gen::<f64>() < p {
            let s = w[1];
            return Ok(Trajectory {
                samples: traj.samples[..k + 2].to_vec(),
                termination: Termination::Jump { t: s.t, x: s.x, y: s.y },
            });
        }
    }
    Ok(traj.clone())
}
