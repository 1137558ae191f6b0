//! Scenario file schema. Every block rejects unknown keys; numbers are in
//! natural units except the optional `si` block of `leaky`.

use std::fmt;
use std::path::Path;

use cavityflow::dynamics::analytic::GaussianPacket;
use cavityflow::dynamics::{Boundary, ModeKind, PropagatorConfig, Scheme};
use cavityflow::leaky::ImagingSetup;
use cavityflow::{make_grid, CavityMedium, DerivativeMethod, Grid2D, GuardConfig, PotentialSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub medium: MediumConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    pub initial_state: InitialState,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub derivatives: DerivativeMethod,
    #[serde(default)]
    pub audits: AuditConfig,
    #[serde(default)]
    pub trajectories: Option<TrajectoryConfig>,
    #[serde(default)]
    pub fig1: Option<Fig1Config>,
    #[serde(default)]
    pub leaky: Option<LeakyConfig>,
    #[serde(default)]
    pub guards: GuardConfig,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    #[serde(default = "one")]
    pub eps_real: f64,
    #[serde(default)]
    pub eps_imag: f64,
    pub q: u32,
    /// Give `mass`, `d0`, or both (then they must agree).
    #[serde(default)]
    pub mass: Option<f64>,
    #[serde(default)]
    pub d0: Option<f64>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub g_e: Option<f64>,
    #[serde(default)]
    pub g_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    #[serde(default = "yes")]
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    Mode { mode: ModeKind },
    Gaussian { packet: GaussianPacket },
    /// Transverse pair generated by a stream function.
    Stream { packet: GaussianPacket },
    /// Circular components.
    Spinor { plus: GaussianPacket, minus: GaussianPacket },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub boundary: Boundary,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { dt: 0.1, t_end: 0.0, snapshot_stride: 10, seed: 0, scheme: Scheme::default(), boundary: Boundary::default() }
    }
}

impl RunConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn propagator(&self) -> PropagatorConfig {
        PropagatorConfig { dt: self.dt, scheme: self.scheme, boundary: self.boundary, ..PropagatorConfig::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub equivalence: Option<EquivalenceConfig>,
    pub conservation: bool,
    pub berry: Option<BerryConfig>,
    pub bell_jumps: Option<BellConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceConfig {
    pub nz_per_q: usize,
    pub longitudinal: bool,
    pub include_grad_v: bool,
    /// In-plane polarisation of scalar states.
    pub polarization: [f64; 2],
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        Self { nz_per_q: 64, longitudinal: true, include_grad_v: false, polarization: [0.0, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerryConfig {
    pub nz_per_q: usize,
    /// Height of the analysed slice as a fraction of `D0`.
    pub z_fraction: f64,
}

impl Default for BerryConfig {
    fn default() -> Self {
        Self { nz_per_q: 32, z_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellConfig {
    pub trajectories: usize,
    /// Defaults to the medium loss rate.
    pub rate: Option<f64>,
    /// Defaults to `1 / rate`.
    pub t_end: Option<f64>,
    /// Defaults to `0.01 / rate`.
    pub dt: Option<f64>,
}

impl Default for BellConfig {
    fn default() -> Self {
        Self { trajectories: 10_000, rate: None, t_end: None, dt: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub seeds: Vec<[f64; 2]>,
    pub dt: f64,
    /// Defaults to the run length, or 100 dt for stationary states.
    #[serde(default)]
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    pub nz_per_q: usize,
    /// Grid row of the x-z cut; defaults to the centre row.
    pub row: Option<usize>,
    /// Height of the red local-flow seeds as a fraction of `D0`.
    pub z_local: f64,
    /// Start abscissae of the white (z-averaged) paths at z = 0.
    pub white_x: Vec<f64>,
    /// Start abscissae of the red (local S/u) paths at `z_local`.
    pub red_x: Vec<f64>,
    pub heatmap_rows: usize,
    pub path_dt: f64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            nz_per_q: 64,
            row: None,
            z_local: 0.5,
            white_x: vec![-60.0, -40.0, -20.0, 0.0],
            red_x: vec![-50.0, -30.0, -10.0],
            heatmap_rows: 192,
            path_dt: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakyConfig {
    pub energy: f64,
    /// Mirror loss in `r = -(1 - eta)`; defaults to `1 - exp(-sqrt(eps') Gamma D0)`.
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default = "one")]
    pub i0: f64,
    /// Source height as a fraction of `D0`.
    #[serde(default = "source_fraction")]
    pub source_height: f64,
    #[serde(default)]
    pub imaging: Option<ImagingSetup>,
    /// Object window `[x_min, x_max]` with spacing `dx`.
    pub window: [f64; 2],
    pub dx: f64,
    #[serde(default = "image_points")]
    pub image_points: usize,
    #[serde(default)]
    pub si: Option<SiConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiConfig {
    pub lifetime_s: f64,
    pub detuning_ev: f64,
    pub wavelength_m: f64,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn source_fraction() -> f64 {
    0.01
}

fn image_points() -> usize {
    401
}

/// Every problem found in a configuration, not just the first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration problem(s):", self.problems.len())?;
        for p in &self.problems {
            write!(f, "\n  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn one(msg: String) -> Self {
        Self { problems: vec![msg] }
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
        ConfigError::one(format!("parse error at line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let problems = cfg.validate();
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { problems })
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::one(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn positive(out: &mut Vec<String>, name: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        out.push(format!("{name} must be > 0, got {v}"));
    }
}

fn non_negative(out: &mut Vec<String>, name: &str, v: f64) {
    if !(v.is_finite() && v >= 0.0) {
        out.push(format!("{name} must be >= 0, got {v}"));
    }
}

fn packet_problems(out: &mut Vec<String>, name: &str, p: &GaussianPacket) {
    positive(out, &format!("{name}.sigma"), p.sigma);
    for (k, v) in [("x0", p.x0), ("y0", p.y0), ("kx", p.kx), ("ky", p.ky)] {
        if !v.is_finite() {
            out.push(format!("{name}.{k} must be finite"));
        }
    }
}

impl MediumConfig {
    pub fn build(&self) -> cavityflow::Result<CavityMedium> {
        let base = match (self.mass, self.d0) {
            (Some(m), Some(d)) => {
                let medium = CavityMedium::from_mass(self.eps_real, self.eps_imag, m, self.q, self.gamma)?;
                if (medium.d0 - d).abs() > 1e-9 * d {
                    return Err(cavityflow::Error::config(format!(
                        "mass {m} and d0 {d} disagree for q = {} (mass implies d0 = {})",
                        self.q, medium.d0
                    )));
                }
                medium
            }
            (Some(m), None) => CavityMedium::from_mass(self.eps_real, self.eps_imag, m, self.q, self.gamma)?,
            (None, Some(d)) => CavityMedium::from_geometry(self.eps_real, self.eps_imag, self.q, d, self.gamma)?,
            (None, None) => return Err(cavityflow::Error::config("medium needs mass or d0")),
        };
        base.with_dispersion(self.g_e.unwrap_or(base.g_e), self.g_b.unwrap_or(base.g_b))
    }
}

impl GridConfig {
    pub fn build(&self, method: DerivativeMethod) -> cavityflow::Result<Grid2D> {
        make_grid(self.nx, self.ny, self.lx, self.ly, self.periodic, method == DerivativeMethod::Spectral)
    }
}

impl ScenarioConfig {
    /// All violations, field checks first, then cross-field and core checks.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let m = &self.medium;
        positive(&mut out, "medium.eps_real", m.eps_real);
        non_negative(&mut out, "medium.eps_imag", m.eps_imag);
        non_negative(&mut out, "medium.gamma", m.gamma);
        if m.q < 1 {
            out.push("medium.q must be >= 1".into());
        }
        if let Some(v) = m.mass {
            positive(&mut out, "medium.mass", v);
        }
        if let Some(v) = m.d0 {
            positive(&mut out, "medium.d0", v);
        }
        let field_ok = out.is_empty();
        let medium = if field_ok {
            match m.build() {
                Ok(v) => Some(v),
                Err(e) => {
                    out.push(format!("medium: {e}"));
                    None
                }
            }
        } else {
            None
        };

        let g = &self.grid;
        positive(&mut out, "grid.lx", g.lx);
        positive(&mut out, "grid.ly", g.ly);
        let grid = match g.build(self.derivatives) {
            Ok(v) => Some(v),
            Err(e) => {
                out.push(format!("grid: {e}"));
                None
            }
        };

        match &self.initial_state {
            InitialState::Mode { mode } => {
                if matches!(mode, ModeKind::PlaneWave { .. } | ModeKind::LeakyPlaneWave { .. }) && self.run.t_end > 0.0 && !g.periodic {
                    out.push("initial_state: propagating a plane wave needs a periodic grid".into());
                }
            }
            InitialState::Gaussian { packet } | InitialState::Stream { packet } => packet_problems(&mut out, "initial_state.packet", packet),
            InitialState::Spinor { plus, minus } => {
                packet_problems(&mut out, "initial_state.plus", plus);
                packet_problems(&mut out, "initial_state.minus", minus);
            }
        }

        let r = &self.run;
        positive(&mut out, "run.dt", r.dt);
        non_negative(&mut out, "run.t_end", r.t_end);
        if r.snapshot_stride == 0 {
            out.push("run.snapshot_stride must be >= 1".into());
        }
        if let Some(grid) = &grid {
            let needs_fft = (r.t_end > 0.0 && r.scheme == Scheme::SplitStepSpectral)
                || matches!(self.initial_state, InitialState::Stream { .. });
            if needs_fft {
                if let Err(e) = grid.require_spectral() {
                    out.push(format!("grid: split-step runs and stream states need FFTs: {e}"));
                }
            }
        }
        if r.t_end == 0.0 && self.audits.conservation {
            out.push("audits.conservation needs run.t_end > 0".into());
        }

        if let (Some(medium), Some(grid)) = (&medium, &grid) {
            if let Some(spec) = &self.potential {
                let strict = GuardConfig { strict: self.guards.strict, ..self.guards };
                if let Err(e) = cavityflow::eval_potential(spec, grid, medium, &strict) {
                    out.push(format!("potential: {e}"));
                }
            }
            if r.t_end > 0.0 && r.dt > 0.0 {
                let v = self
                    .potential
                    .as_ref()
                    .and_then(|s| cavityflow::eval_potential(s, grid, medium, &GuardConfig::default()).ok())
                    .map(|(v, _)| v)
                    .unwrap_or_else(|| cavityflow::RealField::zeros(*grid));
                let pot = cavityflow::dynamics::ComplexPotential::from_medium(v, medium);
                if let Err(e) = r.propagator().validate(&pot) {
                    out.push(format!("run: {e}"));
                }
            }
            if let InitialState::Mode { mode } = &self.initial_state {
                if let Err(e) = cavityflow::dynamics::stationary_mode(mode, grid, medium) {
                    out.push(format!("initial_state: {e}"));
                }
            }
            if let Some(eq) = &self.audits.equivalence {
                if let Err(e) = cavityflow::maxwell::ZGrid::for_medium(medium, eq.nz_per_q) {
                    out.push(format!("audits.equivalence: {e}"));
                }
                if eq.polarization[0].hypot(eq.polarization[1]) == 0.0 {
                    out.push("audits.equivalence.polarization must be non-zero".into());
                }
            }
            if let Some(f) = &self.fig1 {
                if let Err(e) = cavityflow::maxwell::ZGrid::for_medium(medium, f.nz_per_q) {
                    out.push(format!("fig1: {e}"));
                }
                if f.row.is_some_and(|row| row >= grid.ny()) {
                    out.push(format!("fig1.row must be < ny = {}", grid.ny()));
                }
                if !(f.z_local > 0.0 && f.z_local < 1.0) {
                    out.push("fig1.z_local must lie in (0, 1)".into());
                }
                positive(&mut out, "fig1.path_dt", f.path_dt);
                if f.heatmap_rows < 2 {
                    out.push("fig1.heatmap_rows must be >= 2".into());
                }
            }
            if let Some(b) = &self.audits.bell_jumps {
                if b.trajectories == 0 {
                    out.push("audits.bell_jumps.trajectories must be >= 1".into());
                }
                let rate = b.rate.unwrap_or(medium.loss_rate());
                if !(rate.is_finite() && rate > 0.0) {
                    out.push("audits.bell_jumps needs a positive rate (medium loss or explicit)".into());
                }
            }
        }
        if let Some(b) = &self.audits.berry {
            if !(b.z_fraction > 0.0 && b.z_fraction < 1.0) {
                out.push("audits.berry.z_fraction must lie in (0, 1)".into());
            }
        }
        if self.fig1.is_some() && !matches!(self.initial_state, InitialState::Mode { .. } | InitialState::Gaussian { .. }) {
            out.push("fig1 needs a scalar initial state (mode or gaussian)".into());
        }
        if let Some(t) = &self.trajectories {
            if t.seeds.is_empty() {
                out.push("trajectories.seeds must not be empty".into());
            }
            positive(&mut out, "trajectories.dt", t.dt);
            if let Some(te) = t.t_end {
                positive(&mut out, "trajectories.t_end", te);
            }
        }
        if let Some(l) = &self.leaky {
            positive(&mut out, "leaky.energy", l.energy);
            positive(&mut out, "leaky.dx", l.dx);
            if let Some(eta) = l.eta {
                if !(eta >= 0.0 && eta < 1.0) {
                    out.push(format!("leaky.eta must lie in [0, 1), got {eta}"));
                }
            }
            if !(l.source_height > 0.0 && l.source_height <= 0.05) {
                out.push("leaky.source_height (d/D) must lie in (0, 0.05]".into());
            }
            if !(l.window[1] > l.window[0]) {
                out.push("leaky.window must be increasing".into());
            }
            if l.image_points < 2 {
                out.push("leaky.image_points must be >= 2".into());
            }
            if let Some(img) = &l.imaging {
                if let Err(e) = img.validate(m.eps_real) {
                    out.push(format!("leaky.imaging: {e}"));
                }
            }
            if let Some(si) = &l.si {
                positive(&mut out, "leaky.si.lifetime_s", si.lifetime_s);
                positive(&mut out, "leaky.si.wavelength_m", si.wavelength_m);
                if !(si.detuning_ev < 0.0) {
                    out.push("leaky.si.detuning_ev must be < 0 (evanescent regime)".into());
                }
            }
        }
        out
    }
}
