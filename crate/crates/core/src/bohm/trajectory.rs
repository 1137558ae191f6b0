use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::velocity::VelocityField2D;

/// Velocity as a function of time and position. `None` marks points where the
/// guidance field is undefined (outside the domain or below the density floor).
pub trait VelocityProvider {
    fn velocity(&self, t: f64, x: f64, y: f64) -> Option<(f64, f64)>;
    /// Length scale for the step-explosion guard.
    fn cell_size(&self) -> f64;
}

impl VelocityProvider for VelocityField2D {
    fn velocity(&self, _t: f64, x: f64, y: f64) -> Option<(f64, f64)> {
        self.sample(x, y)
    }

    fn cell_size(&self) -> f64 {
        self.grid().dx().min(self.grid().dy())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformVelocity {
    pub vx: f64,
    pub vy: f64,
    pub cell: f64,
}

impl VelocityProvider for UniformVelocity {
    fn velocity(&self, _t: f64, _x: f64, _y: f64) -> Option<(f64, f64)> {
        Some((self.vx, self.vy))
    }

    fn cell_size(&self) -> f64 {
        self.cell
    }
}

/// Closure-backed provider.
pub struct FnVelocity<F> {
    pub f: F,
    pub cell: f64,
}

impl<F: Fn(f64, f64, f64) -> Option<(f64, f64)>> VelocityProvider for FnVelocity<F> {
    fn velocity(&self, t: f64, x: f64, y: f64) -> Option<(f64, f64)> {
        (self.f)(t, x, y)
    }

    fn cell_size(&self) -> f64 {
        self.cell
    }
}

/// Snapshots interpolated linearly in time; constant outside their span.
#[derive(Debug, Clone)]
pub struct SnapshotVelocity {
    times: Vec<f64>,
    fields: Vec<VelocityField2D>,
}

impl SnapshotVelocity {
    pub fn new(times: Vec<f64>, fields: Vec<VelocityField2D>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(Error::config("snapshot times and fields must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("snapshot times must increase strictly"));
        }
        for f in &fields[1..] {
            fields[0].grid().ensure_same(f.grid())?;
        }
        Ok(Self { times, fields })
    }
}

impl VelocityProvider for SnapshotVelocity {
    fn velocity(&self, t: f64, x: f64, y: f64) -> Option<(f64, f64)> {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.fields[0].sample(x, y);
        }
        if t >= self.times[n - 1] {
            return self.fields[n - 1].sample(x, y);
        }
        let k = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[k]) / (self.times[k + 1] - self.times[k]);
        let a = self.fields[k].sample(x, y)?;
        let b = self.fields[k + 1].sample(x, y)?;
        Some(((1.0 - w) * a.0 + w * b.0, (1.0 - w) * a.1 + w * b.1))
    }

    fn cell_size(&self) -> f64 {
        self.fields[0].cell_size()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    None,
    Jump { t: f64, x: f64, y: f64 },
    LeftDomain { t: f64 },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::None => "running",
            Termination::Jump { .. } => "jump",
            Termination::LeftDomain { .. } => "left-domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn end(&self) -> TrajectorySample {
        *self.samples.last().expect("trajectory has a seed sample")
    }
}

/// Classical RK4 from `(x0, y0)` at `t0` to `t1`; the last step is shortened
/// to land on `t1`.
pub fn integrate_trajectory(
    provider: &impl VelocityProvider,
    start: (f64, f64),
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) || !(t1 >= t0) {
        return Err(Error::config(format!("need dt > 0 and t1 >= t0, got dt = {dt}, [{t0}, {t1}]")));
    }
    let limit = 10.0 * provider.cell_size();
    let (mut x, mut y) = start;
    let mut t = t0;
    let mut samples = vec![TrajectorySample { t, x, y }];
    if provider.velocity(t, x, y).is_none() {
        return Ok(Trajectory { samples, termination: Termination::LeftDomain { t } });
    }
    let n = ((t1 - t0) / dt - 1e-9).ceil().max(0.0) as usize;
    for k in 0..n {
        let h = if k + 1 == n { t1 - t } else { dt };
        let step = (|| {
            let k1 = provider.velocity(t, x, y)?;
            let k2 = provider.velocity(t + 0.5 * h, x + 0.5 * h * k1.0, y + 0.5 * h * k1.1)?;
            let k3 = provider.velocity(t + 0.5 * h, x + 0.5 * h * k2.0, y + 0.5 * h * k2.1)?;
            let k4 = provider.velocity(t + h, x + h * k3.0, y + h * k3.1)?;
            Some((
                h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            ))
        })();
        let Some((dx, dy)) = step else {
            return Ok(Trajectory { samples, termination: Termination::LeftDomain { t } });
        };
        let len = dx.hypot(dy);
        if !len.is_finite() || len > limit {
            return Err(Error::StepExplosion { t, step_length: len, limit });
        }
        x += dx;
        y += dy;
        t = if k + 1 == n { t1 } else { t0 + (k + 1) as f64 * dt };
        samples.push(TrajectorySample { t, x, y });
        if provider.velocity(t, x, y).is_none() {
            return Ok(Trajectory { samples, termination: Termination::LeftDomain { t } });
        }
    }
    Ok(Trajectory { samples, termination: Termination::None })
}
