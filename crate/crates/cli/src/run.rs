//! Scenario execution: build the state, evolve it, run the requested audits
//! and write every artefact through [`OutputDir`].

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use cavityflow::bohm::{
    bell_jump_ensemble, interrupt_trajectory, pauli_velocity, scalar_velocity, integrate_trajectory, FnVelocity,
    JumpProcess, SnapshotVelocity, Trajectory, VelocityField2D,
};
use cavityflow::dynamics::{
    leaky_wavevector, propagate, propagate_snapshots, spinor_from_stream, stationary_mode, transversality_residual,
    ComplexPotential, ModeKind, PropagatorConfig, StreamFunction,
};
use cavityflow::leaky::{
    cavity_spectrum, fabry_perot_mode, fabry_perot_mode_expansion, image_field, leaky_field, pole_parameters, si,
    ReflectivityModel, SampledLine, SourceSpec,
};
use cavityflow::maxwell::{
    berry_decompose, conservation_audit, equivalence_audit, reconstruct_fields, z_average_fields, AuditOptions,
    EnergyPoint, EquivalenceReport, Fields3D, PlanarSource, ReconstructionOptions, ZGrid,
};
use cavityflow::{
    eval_potential, CavityMedium, ComplexScalarField, Grid2D, RealField, SpinorField, Warning, C64,
};
use serde::Serialize;

use crate::config::{ConfigError, Fig1Config, InitialState, LeakyConfig, ScenarioConfig};
use crate::output::{sha256_hex, Manifest, OutputDir};
use crate::plot::{Band, Figure, Heatmap, Series};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides `output` in the configuration.
    pub out_dir: Option<PathBuf>,
    /// Overrides `run.seed`.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Summary {
    pub row: usize,
    pub y: f64,
    pub slope_measured: f64,
    pub slope_expected: Option<f64>,
    pub slope_rel_error: Option<f64>,
    pub decay_measured: f64,
    pub decay_expected: Option<f64>,
    pub decay_rel_error: Option<f64>,
    pub white_paths: usize,
    pub red_paths: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurvivalSummary {
    pub trajectories: usize,
    pub rate: f64,
    pub t_end: f64,
    pub final_fraction: f64,
    pub final_expected: f64,
    pub final_within_three_sigma: bool,
    pub samples_within_three_sigma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeakySummary {
    pub energy: f64,
    pub omega: f64,
    pub eta: f64,
    pub xi: C64,
    pub kx: C64,
    pub kz: C64,
    pub is_leaky: bool,
    pub fabry_perot_kz: C64,
    pub fabry_perot_kz_expansion: C64,
    pub source_height: f64,
    /// Half width at half maximum of `|spectrum|^2` around `Re kx`.
    pub spectrum_half_width: Option<f64>,
    pub image_agreement: Option<f64>,
    pub evanescent_speed_m_per_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BerrySummary {
    pub z: f64,
    pub residual: f64,
    pub orbital_max: f64,
    pub spin_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationSummary {
    pub audited_steps: usize,
    pub max_residual_l2: f64,
    pub max_residual_linf: f64,
    pub max_norm_ratio_error: f64,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub equivalence: Option<EquivalenceReport>,
    pub conservation: Option<ConservationSummary>,
    pub berry: Option<BerrySummary>,
    pub survival: Option<SurvivalSummary>,
    pub fig1: Option<Fig1Summary>,
    pub leaky: Option<LeakySummary>,
    pub max_transversality: Option<f64>,
}

/// Evolving state. Stream states carry the generating scalar.
#[derive(Debug, Clone)]
enum State {
    Scalar(ComplexScalarField),
    Spinor(SpinorField),
    Stream(StreamFunction),
}

impl State {
    fn spinor(&self) -> Result<Option<SpinorField>> {
        Ok(match self {
            State::Scalar(_) => None,
            State::Spinor(s) => Some(s.clone()),
            State::Stream(q) => Some(spinor_from_stream(q)?.cartesian),
        })
    }

    /// Scalar components whose densities sum to the photon density.
    fn components(&self) -> Result<Vec<ComplexScalarField>> {
        Ok(match self {
            State::Scalar(p) => vec![p.clone()],
            _ => {
                let s = self.spinor()?.expect("spinor state").to_circular();
                let (a, b) = s.into_components();
                vec![a, b]
            }
        })
    }

    fn density(&self) -> Result<Vec<f64>> {
        Ok(match self {
            State::Scalar(p) => p.density(),
            _ => self.spinor()?.expect("spinor state").density(),
        })
    }

    fn planar_source(&self, polarization: [f64; 2]) -> Result<PlanarSource> {
        Ok(match self {
            State::Scalar(p) => PlanarSource::scalar(p.clone(), polarization[0], polarization[1])?,
            _ => PlanarSource::Spinor(self.spinor()?.expect("spinor state")),
        })
    }
}

struct Setup {
    medium: CavityMedium,
    grid: Grid2D,
    v: Option<RealField>,
    pot: ComplexPotential,
    warnings: Vec<Warning>,
}

fn build(cfg: &ScenarioConfig) -> Result<Setup> {
    let medium = cfg.medium.build()?;
    let grid = cfg.grid.build(cfg.derivatives)?;
    let mut warnings = medium.guard_warnings(&cfg.guards);
    let v = match &cfg.potential {
        Some(spec) => {
            let (v, w) = eval_potential(spec, &grid, &medium, &cfg.guards)?;
            warnings.extend(w);
            Some(v)
        }
        None => None,
    };
    let pot = ComplexPotential::from_medium(v.clone().unwrap_or_else(|| RealField::zeros(grid)), &medium);
    Ok(Setup { medium, grid, v, pot, warnings })
}

fn initial_state(cfg: &ScenarioConfig, s: &Setup) -> Result<State> {
    Ok(match &cfg.initial_state {
        InitialState::Mode { mode } => State::Scalar(stationary_mode(mode, &s.grid, &s.medium)?),
        InitialState::Gaussian { packet } => State::Scalar(packet.free(&s.grid, &s.medium, 0.0)),
        InitialState::Stream { packet } => State::Stream(StreamFunction { q: packet.free(&s.grid, &s.medium, 0.0) }),
        InitialState::Spinor { plus, minus } => {
            State::Spinor(SpinorField::circular(plus.free(&s.grid, &s.medium, 0.0), minus.free(&s.grid, &s.medium, 0.0))?)
        }
    })
}

fn evolve(state: &State, s: &Setup, pc: &PropagatorConfig, steps: usize, stride: usize) -> Result<Vec<(f64, State)>> {
    if steps == 0 {
        return Ok(vec![(0.0, state.clone())]);
    }
    let run = |psi: &ComplexScalarField| propagate_snapshots(psi, &s.pot, &s.medium, pc, steps, stride);
    Ok(match state {
        State::Scalar(p) => run(p)?.into_iter().map(|sn| (sn.t, State::Scalar(sn.field))).collect(),
        State::Stream(q) => run(&q.q)?.into_iter().map(|sn| (sn.t, State::Stream(StreamFunction { q: sn.field }))).collect(),
        State::Spinor(sp) => {
            let (a, b) = sp.components();
            let (ra, rb) = (run(a)?, run(b)?);
            let mut out = Vec::with_capacity(ra.len());
            for (x, y) in ra.into_iter().zip(rb) {
                out.push((x.t, State::Spinor(SpinorField::new(x.field, y.field, sp.basis())?)));
            }
            out
        }
    })
}

fn field_rows(psi: &ComplexScalarField) -> Vec<Vec<f64>> {
    let g = psi.grid();
    psi.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (x, y) = g.coords(i);
            vec![x, y, v.re, v.im]
        })
        .collect()
}

fn density_figure(title: &str, grid: &Grid2D, density: Vec<f64>) -> Figure {
    let (x0, x1, y0, y1) = grid.sample_bounds();
    let mut fig = Figure::new(title, "x", "y");
    fig.heatmap = Some(Heatmap {
        nx: grid.nx(),
        ny: grid.ny(),
        values: density,
        x_range: (x0, x1),
        y_range: (y0, y1),
        label: "|Psi|^2".into(),
    });
    fig.x_range = Some((x0, x1));
    fig.y_range = Some((y0, y1));
    fig
}

/// Validate, run and write all outputs. Validation failures are returned as
/// [`ConfigError`]; numerical failures as [`cavityflow::Error`].
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let started = Instant::now();
    let problems = cfg.validate();
    if !problems.is_empty() {
        return Err(ConfigError { problems }.into());
    }
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("out-{}", if cfg.name.is_empty() { "scenario" } else { &cfg.name })));
    let seed = opts.seed.unwrap_or(cfg.run.seed);
    let mut out = OutputDir::create(&out_dir)?;
    let mut setup = build(cfg)?;
    out.write_json("config.json", cfg)?;

    let state0 = initial_state(cfg, &setup)?;
    let pc = cfg.run.propagator();
    let snapshots = evolve(&state0, &setup, &pc, cfg.run.steps(), cfg.run.snapshot_stride)?;
    let (t_final, state) = snapshots.last().cloned().expect("at least the initial snapshot");

    match &state {
        State::Scalar(p) => out.write_csv("fields.csv", &["x", "y", "re", "im"], field_rows(p))?,
        _ => {
            let sp = state.spinor()?.expect("spinor state").to_circular();
            let (a, b) = sp.components();
            out.write_csv("fields_plus.csv", &["x", "y", "re", "im"], field_rows(a))?;
            out.write_csv("fields_minus.csv", &["x", "y", "re", "im"], field_rows(b))?;
        }
    }

    let mut norm_rows = Vec::new();
    let n0 = norm(&snapshots[0].1, &setup.grid)?;
    for (t, st) in &snapshots {
        let n = norm(st, &setup.grid)?;
        norm_rows.push(vec![*t, n, n0 * (-setup.medium.loss_rate() * t).exp()]);
    }
    out.write_csv("norm.csv", &["t", "norm", "expected"], norm_rows)?;

    let mut max_transversality = None;
    if matches!(state0, State::Stream(_)) {
        let mut rows = Vec::new();
        let mut worst = 0.0f64;
        for (t, st) in &snapshots {
            let sp = st.spinor()?.expect("spinor state");
            let (px, py) = sp.components();
            let r = transversality_residual(px, py)?;
            worst = worst.max(r.relative());
            rows.push(vec![*t, r.linf, r.rms, r.relative()]);
        }
        out.write_csv("transversality.csv", &["t", "linf", "rms", "relative"], rows)?;
        max_transversality = Some(worst);
    }

    let conservation = if cfg.audits.conservation { Some(conservation(cfg, &setup, &pc, &snapshots, &mut out)?) } else { None };

    let pol = cfg.audits.equivalence.as_ref().map(|e| e.polarization).unwrap_or([0.0, 1.0]);
    let equivalence = match &cfg.audits.equivalence {
        Some(eq) => {
            let zg = ZGrid::for_medium(&setup.medium, eq.nz_per_q)?;
            let include = match cfg.run.boundary {
                cavityflow::dynamics::Boundary::Periodic => None,
                b => Some(b.interior_mask(&setup.grid)),
            };
            let opts = AuditOptions {
                method: cfg.derivatives,
                longitudinal: eq.longitudinal,
                include_grad_v: eq.include_grad_v,
                include,
                guards: cfg.guards,
            };
            let report = equivalence_audit(&state.planar_source(pol)?, setup.v.as_ref(), &setup.medium, &zg, &opts)?;
            setup.warnings.extend(report.warnings.iter().cloned());
            out.write_json("equivalence.json", &report)?;
            out.write_csv(
                "equivalence.csv",
                &["x", "y", "dev_planar", "v_z"],
                report.points.iter().map(|p| vec![p.x, p.y, p.dev_planar, p.v_z]),
            )?;
            Some(report)
        }
        None => None,
    };

    let berry = match &cfg.audits.berry {
        Some(b) => {
            let zg = ZGrid::for_medium(&setup.medium, b.nz_per_q)?;
            let ro = ReconstructionOptions { method: cfg.derivatives, longitudinal: true, include_grad_v: false, t: t_final };
            let (fields, w) = reconstruct_fields(&state.planar_source(pol)?, setup.v.as_ref(), &setup.medium, &zg, &ro, &cfg.guards)?;
            setup.warnings.extend(w);
            Some(berry(&fields, &zg, b.z_fraction, cfg, &mut out)?)
        }
        None => None,
    };

    let survival = match &cfg.audits.bell_jumps {
        Some(b) => {
            let rate = b.rate.unwrap_or(setup.medium.loss_rate());
            let t_end = b.t_end.unwrap_or(1.0 / rate);
            let dt = b.dt.unwrap_or(0.01 / rate);
            let curve = bell_jump_ensemble(&JumpProcess::new(rate, seed)?, b.trajectories, 0.0, t_end, dt)?;
            let k_last = curve.times.len() - 1;
            let within = (0..curve.times.len()).filter(|&k| curve.within_three_sigma(k)).count() as f64 / curve.times.len() as f64;
            out.write_csv(
                "survival.csv",
                &["t", "fraction", "ci_lo", "ci_hi", "expected"],
                (0..curve.times.len()).map(|k| {
                    vec![curve.times[k], curve.fraction[k], curve.ci_lo[k], curve.ci_hi[k], curve.expected(curve.times[k])]
                }),
            )?;
            let mut fig = Figure::new("Bell-jump survival", "t", "surviving fraction");
            fig.bands.push(Band { x: curve.times.clone(), lo: curve.ci_lo.clone(), hi: curve.ci_hi.clone(), color: "#6baed6".into() });
            fig.series.push(Series::new(curve.times.iter().copied().zip(curve.fraction.iter().copied()).collect(), "#08306b").labelled("ensemble"));
            fig.series.push(
                Series::new(curve.times.iter().map(|&t| (t, curve.expected(t))).collect(), "#cb181d").dashed().labelled("exp(-rate t)"),
            );
            out.write("survival.svg", fig.render().as_bytes())?;
            let summary = SurvivalSummary {
                trajectories: curve.n,
                rate,
                t_end,
                final_fraction: curve.fraction[k_last],
                final_expected: curve.expected(curve.times[k_last]),
                final_within_three_sigma: curve.within_three_sigma(k_last),
                samples_within_three_sigma: within,
            };
            out.write_json("survival.json", &summary)?;
            Some(summary)
        }
        None => None,
    };

    let mut density_fig = density_figure("Photon density", &setup.grid, state.density()?);
    if let Some(tc) = &cfg.trajectories {
        let paths = trajectories(cfg, &setup, &snapshots, tc, seed, &mut out)?;
        for (i, p) in paths.iter().enumerate() {
            let color = if matches!(p.termination, cavityflow::bohm::Termination::Jump { .. }) { "#ff4040" } else { "white" };
            let mut s = Series::new(p.samples.iter().map(|s| (s.x, s.y)).collect(), color);
            if i == 0 {
                s = s.labelled("trajectories");
            }
            density_fig.series.push(s);
        }
    }
    out.write("density.svg", density_fig.render().as_bytes())?;

    let fig1 = match &cfg.fig1 {
        Some(f) => {
            let State::Scalar(psi) = &state else { unreachable!("validated: fig1 needs a scalar state") };
            Some(fig1(cfg, f, &mut setup, psi, pol, t_final, &mut out)?)
        }
        None => None,
    };

    let leaky = match &cfg.leaky {
        Some(l) => Some(leaky(l, &mut setup, &mut out)?),
        None => None,
    };

    let mut warnings: Vec<Warning> = Vec::new();
    for w in setup.warnings.drain(..) {
        if !warnings.iter().any(|v| v.code == w.code && v.message == w.message) {
            warnings.push(w);
        }
    }
    let config_hash = sha256_hex(serde_json::to_string(cfg)?.as_bytes());
    let manifest = out.finish(Manifest {
        tool: env!("CARGO_PKG_NAME"),
        tool_version: env!("CARGO_PKG_VERSION"),
        scenario: cfg.name.clone(),
        config_hash,
        seed,
        wall_time_s: started.elapsed().as_secs_f64(),
        warnings,
        files: Vec::new(),
    })?;
    Ok(RunSummary { out_dir, manifest, equivalence, conservation, berry, survival, fig1, leaky, max_transversality })
}

fn norm(state: &State, grid: &Grid2D) -> Result<f64> {
    Ok(state.density()?.iter().sum::<f64>() * grid.cell_area())
}

/// Continuity audit over one extra step from every snapshot.
fn conservation(
    cfg: &ScenarioConfig,
    s: &Setup,
    pc: &PropagatorConfig,
    snapshots: &[(f64, State)],
    out: &mut OutputDir,
) -> Result<ConservationSummary> {
    let include = match cfg.run.boundary {
        cavityflow::dynamics::Boundary::Periodic => None,
        b => Some(b.interior_mask(&s.grid)),
    };
    let mut rows = Vec::new();
    let mut summary = ConservationSummary { audited_steps: 0, max_residual_l2: 0.0, max_residual_linf: 0.0, max_norm_ratio_error: 0.0 };
    for (t, st) in snapshots {
        for (c, psi0) in st.components()?.iter().enumerate() {
            let psi1 = propagate(psi0, &s.pot, &s.medium, pc, 1)?;
            let r = conservation_audit(psi0, &psi1, pc.dt, &s.medium, cfg.derivatives, include.as_deref())?;
            summary.max_residual_l2 = summary.max_residual_l2.max(r.residual_l2);
            summary.max_residual_linf = summary.max_residual_linf.max(r.residual_linf);
            summary.max_norm_ratio_error = summary.max_norm_ratio_error.max(r.norm_ratio_error);
            rows.push(vec![*t, c as f64, r.residual_l2, r.residual_linf, r.norm_ratio, r.expected_ratio]);
        }
        summary.audited_steps += 1;
    }
    out.write_csv("conservation.csv", &["t", "component", "residual_l2", "residual_linf", "norm_ratio", "expected_ratio"], rows)?;
    out.write_json("conservation.json", &summary)?;
    Ok(summary)
}

fn berry(fields: &Fields3D, zg: &ZGrid, z_fraction: f64, cfg: &ScenarioConfig, out: &mut OutputDir) -> Result<BerrySummary> {
    let k = ((z_fraction * (zg.nz() - 1) as f64).round() as usize).min(zg.nz() - 1);
    let grid = *fields.grid();
    let slice = fields.slice_z(k);
    let n = grid.len();
    let mut dz = [vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n], vec![C64::new(0.0, 0.0); n]];
    for idx in 0..n {
        let d = fields.dz_e(idx, k);
        for c in 0..3 {
            dz[c][idx] = d[c];
        }
    }
    let b = berry_decompose(
        [&slice.e[0], &slice.e[1], &slice.e[2]],
        Some([&dz[0], &dz[1], &dz[2]]),
        &grid,
        fields.medium().mass,
        cfg.derivatives,
    )?;
    let mag = |v: &[Vec<f64>; 3]| (0..n).map(|i| (v[0][i].powi(2) + v[1][i].powi(2) + v[2][i].powi(2)).sqrt()).fold(0.0, f64::max);
    let summary = BerrySummary { z: zg.z(k), residual: b.residual, orbital_max: mag(&b.orbital), spin_max: mag(&b.spin) };
    out.write_csv(
        "berry.csv",
        &["x", "y", "orbital_x", "orbital_y", "orbital_z", "spin_x", "spin_y", "spin_z"],
        (0..n).map(|i| {
            let (x, y) = grid.coords(i);
            vec![x, y, b.orbital[0][i], b.orbital[1][i], b.orbital[2][i], b.spin[0][i], b.spin[1][i], b.spin[2][i]]
        }),
    )?;
    out.write_json("berry.json", &summary)?;
    Ok(summary)
}

fn velocity_of(state: &State, medium: &CavityMedium, cfg: &ScenarioConfig) -> Result<VelocityField2D> {
    Ok(match state {
        State::Scalar(p) => scalar_velocity(p, medium, cfg.derivatives)?,
        _ => pauli_velocity(&state.spinor()?.expect("spinor state"), medium, cfg.derivatives)?.total,
    })
}

fn trajectories(
    cfg: &ScenarioConfig,
    s: &Setup,
    snapshots: &[(f64, State)],
    tc: &crate::config::TrajectoryConfig,
    seed: u64,
    out: &mut OutputDir,
) -> Result<Vec<Trajectory>> {
    let mut times = Vec::with_capacity(snapshots.len());
    let mut fields = Vec::with_capacity(snapshots.len());
    for (t, st) in snapshots {
        times.push(*t);
        fields.push(velocity_of(st, &s.medium, cfg)?);
    }
    let provider = SnapshotVelocity::new(times, fields)?;
    let t_end = tc.t_end.unwrap_or(if cfg.run.t_end > 0.0 { cfg.run.t_end } else { 100.0 * tc.dt });
    let jump = JumpProcess::new(s.medium.loss_rate(), seed)?;
    let mut paths = Vec::with_capacity(tc.seeds.len());
    let mut summary = Vec::with_capacity(tc.seeds.len());
    for (i, &[x, y]) in tc.seeds.iter().enumerate() {
        let free = integrate_trajectory(&provider, (x, y), 0.0, t_end, tc.dt)?;
        let path = interrupt_trajectory(&free, &jump, i)?;
        let last = path.samples.len() - 1;
        let status = path.termination.label();
        out.write_csv(
            &format!("trajectories/traj_{i:03}.csv"),
            &["t", "x", "y", "status"],
            path.samples.iter().enumerate().map(|(k, p)| {
                vec![p.t.to_string(), p.x.to_string(), p.y.to_string(), if k == last { status.into() } else { "alive".to_string() }]
            }),
        )?;
        summary.push(serde_json::json!({ "index": i, "seed": [x, y], "termination": path.termination, "end": path.end() }));
        paths.push(path);
    }
    out.write_json("trajectories.json", &summary)?;
    Ok(paths)
}

/// Linear interpolation of row samples at `x`; `None` outside the row or on masked points.
fn interp_row(xs: &[f64], vals: &[(f64, f64)], mask: &[bool], x: f64) -> Option<(f64, f64)> {
    let n = xs.len();
    if !(x >= xs[0] && x <= xs[n - 1]) {
        return None;
    }
    let h = xs[1] - xs[0];
    let i = (((x - xs[0]) / h).floor() as usize).min(n - 2);
    if !(mask[i] && mask[i + 1]) {
        return None;
    }
    let w = (x - xs[i]) / h;
    Some(((1.0 - w) * vals[i].0 + w * vals[i + 1].0, (1.0 - w) * vals[i].1 + w * vals[i + 1].1))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn rel_err(measured: f64, expected: Option<f64>) -> Option<f64> {
    expected.map(|e| ((measured - e) / e).abs())
}

/// Energy-flow picture in the x-z plane at one row: energy density, paths of
/// the z-averaged velocity (white) and of the local `S/u` (red).
fn fig1(
    cfg: &ScenarioConfig,
    f: &Fig1Config,
    s: &mut Setup,
    psi: &ComplexScalarField,
    pol: [f64; 2],
    t: f64,
    out: &mut OutputDir,
) -> Result<Fig1Summary> {
    let medium = s.medium;
    let grid = s.grid;
    let zg = ZGrid::for_medium(&medium, f.nz_per_q)?;
    let ro = ReconstructionOptions { method: cfg.derivatives, longitudinal: true, include_grad_v: false, t };
    let source = PlanarSource::scalar(psi.clone(), pol[0], pol[1])?;
    let (fields, w) = reconstruct_fields(&source, s.v.as_ref(), &medium, &zg, &ro, &cfg.guards)?;
    s.warnings.extend(w);
    let avg = z_average_fields(&fields);
    let row = f.row.unwrap_or(grid.ny() / 2);
    let (nx, d0) = (grid.nx(), medium.d0);
    let xs = grid.xs();
    let idx: Vec<usize> = (0..nx).map(|ix| grid.index(ix, row)).collect();

    // energy density heatmap, z subsampled
    let rows = f.heatmap_rows;
    let mut heat = Vec::with_capacity(nx * rows);
    for r in 0..rows {
        let z = d0 * r as f64 / (rows - 1) as f64;
        for &i in &idx {
            heat.push(EnergyPoint::from_fields(&fields.at_height(i, z), &medium).u);
        }
    }

    // white paths from the z-averaged flow
    let white_v: Vec<(f64, f64)> = idx.iter().map(|&i| (avg.planar.vx[i], avg.vz[i])).collect();
    let white_mask: Vec<bool> = idx.iter().map(|&i| avg.planar.mask[i]).collect();
    let white = FnVelocity {
        f: |_t: f64, x: f64, z: f64| if (0.0..=d0).contains(&z) { interp_row(&xs, &white_v, &white_mask, x) } else { None },
        cell: grid.dx(),
    };
    let vz_ref = 0.5 * medium.gamma * d0;
    let vx_ref = avg.planar.vx.iter().zip(&avg.planar.mask).filter(|(_, m)| **m).map(|(v, _)| v.abs()).fold(0.0, f64::max);
    let t_cross = if vz_ref > 0.0 { 1.05 * d0 / vz_ref } else { grid.lx() / vx_ref.max(1e-12) };
    let t_white = t_cross.min(1e5 * f.path_dt);
    let mut white_paths = Vec::new();
    for &x0 in &f.white_x {
        white_paths.push(integrate_trajectory(&white, (x0, 0.0), 0.0, t_white, f.path_dt)?);
    }

    // red paths from the local energy velocity
    let local = |x: f64, z: f64| -> Option<(f64, f64)> {
        if !(0.0..=d0).contains(&z) || !(x >= xs[0] && x <= xs[nx - 1]) {
            return None;
        }
        let h = xs[1] - xs[0];
        let i = (((x - xs[0]) / h).floor() as usize).min(nx - 2);
        let w = (x - xs[i]) / h;
        let v = |j: usize| {
            let e = EnergyPoint::from_fields(&fields.at_height(idx[j], z), &medium);
            (e.s[0] / e.u, e.s[2] / e.u)
        };
        let (a, b) = (v(i), v(i + 1));
        let r = ((1.0 - w) * a.0 + w * b.0, (1.0 - w) * a.1 + w * b.1);
        (r.0.is_finite() && r.1.is_finite()).then_some(r)
    };
    let red = FnVelocity { f: |_t: f64, x: f64, z: f64| local(x, z), cell: grid.dx() };
    let t_red = (grid.lx() / vx_ref.max(1e-12)).min(1e5 * f.path_dt);
    let mut red_paths = Vec::new();
    for &x0 in &f.red_x {
        red_paths.push(integrate_trajectory(&red, (x0, f.z_local * d0), 0.0, t_red, f.path_dt)?);
    }

    let slopes: Vec<f64> = white_paths
        .iter()
        .filter(|p| p.samples.len() > 2)
        .map(|p| {
            let x: Vec<f64> = p.samples.iter().map(|s| s.x).collect();
            let z: Vec<f64> = p.samples.iter().map(|s| s.y).collect();
            fit_slope(&x, &z)
        })
        .collect();
    let slope_measured = if slopes.is_empty() { f64::NAN } else { slopes.iter().sum::<f64>() / slopes.len() as f64 };

    // decay of the z-integrated energy along x over the central 80 %
    let (lo, hi) = (nx / 10, nx - nx / 10);
    let (dx_fit, du_fit): (Vec<f64>, Vec<f64>) =
        (lo..hi).filter(|&ix| avg.u_int[idx[ix]] > 0.0).map(|ix| (xs[ix], avg.u_int[idx[ix]].ln())).unzip();
    let decay_measured = -fit_slope(&dx_fit, &du_fit);

    let kx = match &cfg.initial_state {
        InitialState::Mode { mode: ModeKind::LeakyPlaneWave { energy } } => Some(leaky_wavevector(*energy, &medium)?),
        _ => None,
    };
    let slope_expected = kx.map(|k| vz_ref / (k.re / medium.kinetic_mass()));
    let decay_expected = kx.map(|k| 2.0 * k.im);
    let summary = Fig1Summary {
        row,
        y: grid.y(row),
        slope_measured,
        slope_expected,
        slope_rel_error: rel_err(slope_measured, slope_expected),
        decay_measured,
        decay_expected,
        decay_rel_error: rel_err(decay_measured, decay_expected),
        white_paths: white_paths.len(),
        red_paths: red_paths.len(),
    };

    let mut rows_csv = Vec::new();
    for (kind, paths) in [("white", &white_paths), ("red", &red_paths)] {
        for (p, path) in paths.iter().enumerate() {
            for smp in &path.samples {
                rows_csv.push(vec![kind.to_string(), p.to_string(), smp.t.to_string(), smp.x.to_string(), smp.y.to_string()]);
            }
        }
    }
    out.write_csv("streamlines.csv", &["kind", "path", "t", "x", "z"], rows_csv)?;
    out.write_csv(
        "fig1_profile.csv",
        &["x", "u_int", "vx_avg", "vz_avg"],
        (0..nx).map(|ix| vec![xs[ix], avg.u_int[idx[ix]], white_v[ix].0, white_v[ix].1]),
    )?;

    let mut fig = Figure::new("Energy flow in the x-z plane", "x", "z");
    fig.heatmap = Some(Heatmap { nx, ny: rows, values: heat, x_range: (xs[0], xs[nx - 1]), y_range: (0.0, d0), label: "u".into() });
    fig.x_range = Some((xs[0], xs[nx - 1]));
    fig.y_range = Some((0.0, d0));
    for (i, p) in white_paths.iter().enumerate() {
        let mut sr = Series::new(p.samples.iter().map(|s| (s.x, s.y)).collect(), "white");
        sr.width = 2.0;
        if i == 0 {
            sr = sr.labelled("z-averaged flow");
        }
        fig.series.push(sr);
    }
    for (i, p) in red_paths.iter().enumerate() {
        let mut sr = Series::new(p.samples.iter().map(|s| (s.x, s.y)).collect(), "#ff3030");
        if i == 0 {
            sr = sr.labelled("local S/u");
        }
        fig.series.push(sr);
    }
    out.write("fig1.svg", fig.render().as_bytes())?;
    out.write_json("fig1.json", &summary)?;
    Ok(summary)
}

fn half_width(ks: &[f64], vals: &[f64]) -> Option<f64> {
    let (imax, vmax) = vals.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let left = (0..imax).rev().find(|&i| vals[i] < 0.5 * vmax)?;
    let right = (imax..vals.len()).find(|&i| vals[i] < 0.5 * vmax)?;
    let cross = |a: usize, b: usize| ks[a] + (0.5 * vmax - vals[a]) / (vals[b] - vals[a]) * (ks[b] - ks[a]);
    Some(0.5 * (cross(right - 1, right) - cross(left + 1, left)))
}

fn leaky(l: &LeakyConfig, s: &mut Setup, out: &mut OutputDir) -> Result<LeakySummary> {
    let m = s.medium;
    let pole = pole_parameters(l.energy, &m)?;
    if let Some(w) = m.energy_warning(l.energy, &Default::default()) {
        s.warnings.push(w);
    }
    let eta = l.eta.unwrap_or_else(|| -(-(m.eps_real.sqrt() * m.gamma * m.d0)).exp_m1());
    let model = ReflectivityModel::from_eta(eta)?;
    let fp = fabry_perot_mode(&model, m.d0, m.q)?;
    let source = SourceSpec { i0: l.i0, d: l.source_height * m.d0 };
    source.validate(m.d0)?;

    // pole field map in the x-z plane, cavity and a layer above it
    let nxm = 256usize.min(((l.window[1] - l.window[0]) / l.dx).round() as usize + 1).max(2);
    let nzm = 128usize;
    let (z_lo, z_hi) = (source.d, 1.5 * m.d0);
    let mut map = Vec::with_capacity(nxm * nzm);
    let mut map_rows = Vec::with_capacity(nxm * nzm);
    for kz in 0..nzm {
        let z = z_lo + (z_hi - z_lo) * kz as f64 / (nzm - 1) as f64;
        for ix in 0..nxm {
            let x = l.window[0] + (l.window[1] - l.window[0]) * ix as f64 / (nxm - 1) as f64;
            let v = leaky_field(&pole, &source, &model, x, z)?;
            map.push(v.value.norm_sqr());
            map_rows.push(vec![x, z, v.value.re, v.value.im, if v.valid { 1.0 } else { 0.0 }]);
        }
    }
    out.write_csv("leaky_field.csv", &["x", "z", "re", "im", "valid"], map_rows)?;
    let mut fig = Figure::new("Leaky pole field |Phi_P|^2", "x", "z");
    fig.heatmap = Some(Heatmap { nx: nxm, ny: nzm, values: map, x_range: (l.window[0], l.window[1]), y_range: (z_lo, z_hi), label: "|Phi_P|^2".into() });
    fig.series.push(Series::new(vec![(l.window[0], m.d0), (l.window[1], m.d0)], "white").dashed().labelled("top mirror"));
    out.write("leaky_field.svg", fig.render().as_bytes())?;

    // spectrum around the pole
    let omega = pole.omega;
    let span = 8.0 * pole.kx.im.max(1e-6 * pole.kx.re);
    let n = 4001;
    let ks: Vec<f64> = (0..n).map(|i| pole.kx.re - span + 2.0 * span * i as f64 / (n - 1) as f64).collect();
    let spec: Vec<C64> = ks.iter().map(|&k| cavity_spectrum(k, omega, &m, &model, &source)).collect();
    let power: Vec<f64> = spec.iter().map(|v| v.norm_sqr()).collect();
    out.write_csv(
        "spectrum.csv",
        &["kx", "re", "im", "power"],
        ks.iter().zip(&spec).zip(&power).map(|((k, v), p)| vec![*k, v.re, v.im, *p]),
    )?;
    let mut sfig = Figure::new("Cavity spectrum", "kx", "|spectrum|^2");
    sfig.series.push(Series::new(ks.iter().copied().zip(power.iter().copied()).collect(), "#08306b"));
    out.write("spectrum.svg", sfig.render().as_bytes())?;

    let image_agreement = match &l.imaging {
        Some(setup) => {
            let z_obj = m.d0 * (1.0 + 1e-9);
            let count = ((l.window[1] - l.window[0]) / l.dx).round() as usize + 1;
            let mut values = Vec::with_capacity(count);
            for j in 0..count {
                values.push(leaky_field(&pole, &source, &model, l.window[0] + j as f64 * l.dx, z_obj)?.value);
            }
            let line = SampledLine { x0: l.window[0], dx: l.dx, values };
            let mag = setup.magnification;
            let (a, b) = (-mag * l.window[1], -mag * l.window[0]);
            let x_out: Vec<f64> = (0..l.image_points).map(|i| a + (b - a) * i as f64 / (l.image_points - 1) as f64).collect();
            let img = image_field(&line, setup, omega, m.eps_real, &x_out)?;
            s.warnings.extend(img.warnings.iter().cloned());
            out.write_csv(
                "image.csv",
                &["x", "spectral_re", "spectral_im", "convolution_re", "convolution_im"],
                (0..x_out.len()).map(|i| vec![x_out[i], img.spectral[i].re, img.spectral[i].im, img.convolution[i].re, img.convolution[i].im]),
            )?;
            let mut ifig = Figure::new("Image-plane intensity", "x (image plane)", "|E|^2");
            ifig.series.push(Series::new(x_out.iter().zip(&img.spectral).map(|(x, v)| (*x, v.norm_sqr())).collect(), "#08306b").labelled("spectral"));
            ifig.series.push(
                Series::new(x_out.iter().zip(&img.convolution).map(|(x, v)| (*x, v.norm_sqr())).collect(), "#cb181d").dashed().labelled("PSF"),
            );
            out.write("image.svg", ifig.render().as_bytes())?;
            Some(img.agreement)
        }
        None => None,
    };

    let evanescent_speed_m_per_s = match &l.si {
        Some(p) => Some(si::evanescent_velocity_si(p.lifetime_s, p.detuning_ev, p.wavelength_m)?),
        None => None,
    };
    let summary = LeakySummary {
        energy: l.energy,
        omega,
        eta,
        xi: pole.xi,
        kx: pole.kx,
        kz: pole.kz,
        is_leaky: pole.is_leaky(),
        fabry_perot_kz: fp,
        fabry_perot_kz_expansion: fabry_perot_mode_expansion(eta, m.d0, m.q),
        source_height: source.d,
        spectrum_half_width: half_width(&ks, &power),
        image_agreement,
        evanescent_speed_m_per_s,
    };
    out.write_json("leaky.json", &summary)?;
    Ok(summary)
}

/// Read, validate and run a configuration file.
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = crate::config::load_config(path)?;
    run_scenario(&cfg, opts).with_context(|| format!("scenario {}", path.display()))
}
