use cavityflow::bohm::{continuity_residual, scalar_velocity};
use cavityflow::dynamics::analytic::{coherent_state, harmonic_potential, GaussianPacket};
use cavityflow::dynamics::{
    implicit_reference_propagate, pauli_propagate, propagate, spinor_from_stream, split_step_propagate,
    stationary_mode, transversality_residual, ComplexPotential, ModeKind, PropagatorConfig, StepSolution,
    StreamFunction,
};
use cavityflow::{make_grid, CavityMedium, ComplexScalarField, DerivativeMethod, Error, Grid2D, RealField, C64, I};
use proptest::prelude::*;

fn medium(gamma: f64) -> CavityMedium {
    CavityMedium::from_mass(1.0, 0.0, 1.0, 1, gamma).unwrap()
}

fn packet() -> GaussianPacket {
    GaussianPacket { x0: -2.0, y0: 1.0, sigma: 2.0, kx: 0.5, ky: -0.25 }
}

fn rel_err(a: &ComplexScalarField, b: &ComplexScalarField) -> f64 {
    a.l2_distance(b).unwrap() / b.norm_sqr().sqrt()
}

/// (dt, n) levels with `dx` and `dt` halved together.
fn refinements() -> [(f64, usize); 3] {
    [(0.1, 64), (0.05, 128), (0.025, 256)]
}

#[test]
fn implicit_reference_is_second_order_on_free_gaussian() {
    let m = medium(1e-2);
    let t_end = 2.0;
    let mut errs = Vec::new();
    let mut gaps = Vec::new();
    for (dt, n) in refinements() {
        let grid = make_grid(n, n, 40.0, 40.0, true, true).unwrap();
        let psi0 = packet().free(&grid, &m, 0.0);
        let exact = packet().free(&grid, &m, t_end);
        let pot = ComplexPotential::flat(&grid, &m);
        let cfg = PropagatorConfig::with_dt(dt);
        let steps = (t_end / dt).round() as usize;
        let cn = implicit_reference_propagate(&psi0, &pot, &m, &cfg, steps).unwrap();
        let ss = split_step_propagate(&psi0, &pot, &m, &cfg, steps).unwrap();
        errs.push(rel_err(&cn, &exact));
        gaps.push(rel_err(&ss, &cn));
        // with V = 0 the split-step factors commute, so only round-off remains
        assert!(rel_err(&ss, &exact) < 1e-10);
    }
    let order = (errs[1] / errs[2]).log2();
    println!("implicit errors {errs:?} order {order:.3}; split-step gaps {gaps:?}");
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2]);
    assert!((order - 2.0).abs() <= 0.2, "{order}");
}

#[test]
fn split_step_is_second_order_in_a_trap() {
    let m = medium(0.0);
    let grid = make_grid(64, 64, 24.0, 24.0, true, true).unwrap();
    let w = 0.5;
    let v = harmonic_potential(&grid, &m, w);
    let pot = ComplexPotential::from_medium(v, &m);
    let psi0 = coherent_state(&grid, &m, w, 2.0, 0.0);
    let t_end = 0.5;
    let exact = coherent_state(&grid, &m, w, 2.0, t_end);
    let errs: Vec<f64> = [0.0025, 0.00125, 0.000625]
        .iter()
        .map(|&dt| {
            let cfg = PropagatorConfig::with_dt(dt);
            let out = split_step_propagate(&psi0, &pot, &m, &cfg, (t_end / dt).round() as usize).unwrap();
            rel_err(&out, &exact)
        })
        .collect();
    let o1 = (errs[0] / errs[1]).log2();
    let o2 = (errs[1] / errs[2]).log2();
    println!("split-step trap errors {errs:?} orders {o1:.3} {o2:.3}");
    assert!((o2 - 2.0).abs() <= 0.2 && (o1 - 2.0).abs() <= 0.2);
}

#[test]
fn norm_decays_exponentially() {
    let m = CavityMedium::from_mass(1.0, 0.002, 1.0, 1, 0.01).unwrap();
    let grid = make_grid(64, 64, 40.0, 40.0, true, true).unwrap();
    let psi0 = packet().free(&grid, &m, 0.0);
    let pot = ComplexPotential::flat(&grid, &m);
    let t_end = 5.0 / m.loss_rate();
    let steps = 500;
    let cfg = PropagatorConfig::with_dt(t_end / steps as f64);
    let out = propagate(&psi0, &pot, &m, &cfg, steps).unwrap();
    let ratio = out.norm_sqr() / psi0.norm_sqr();
    let expected = (-m.loss_rate() * t_end).exp();
    assert!((ratio / expected - 1.0).abs() <= 1e-8);
}

#[test]
fn continuity_residual_converges_at_second_order() {
    let m = medium(0.02);
    let mut res = Vec::new();
    for (dt, n) in refinements() {
        let dt = dt / 4.0;
        let grid = make_grid(n, n, 40.0, 40.0, true, true).unwrap();
        let pot = ComplexPotential::flat(&grid, &m);
        let cfg = PropagatorConfig::with_dt(dt);
        let psi0 = propagate(&packet().free(&grid, &m, 0.0), &pot, &m, &cfg, (1.0 / dt).round() as usize).unwrap();
        let psi1 = propagate(&psi0, &pot, &m, &cfg, 1).unwrap();
        let r = continuity_residual(&psi0, &psi1, dt, &m, DerivativeMethod::CentralDifference, None).unwrap();
        res.push(r.l2);
    }
    let orders = [(res[0] / res[1]).log2(), (res[1] / res[2]).log2()];
    println!("continuity residuals {res:?} orders {orders:?}");
    assert!(orders.iter().all(|&o| o >= 1.8));
}

#[test]
fn stream_pair_stays_transverse() {
    let m = medium(0.01);
    let grid = make_grid(64, 64, 40.0, 40.0, true, true).unwrap();
    let q = packet().free(&grid, &m, 0.0);
    let spinor = spinor_from_stream(&StreamFunction { q }).unwrap().cartesian;
    let pot = ComplexPotential::flat(&grid, &m);
    let cfg = PropagatorConfig::with_dt(0.05);
    let mut s = spinor;
    for _ in 0..20 {
        s = pauli_propagate(&s, &pot, &m, &cfg, 1).unwrap();
        let (a, b) = s.components();
        let r = transversality_residual(a, b).unwrap();
        assert!(r.relative() <= 1e-12, "{}", r.relative());
    }
}

#[test]
fn leaky_mode_guidance_speed() {
    let m = medium(1e-3);
    let grid = Grid2D::new(64, 8, 40.0, 5.0, false).unwrap();
    let psi = stationary_mode(&ModeKind::LeakyPlaneWave { energy: 1e-4 }, &grid, &m).unwrap();
    let v = scalar_velocity(&psi, &m, DerivativeMethod::Spectral);
    assert!(v.is_err(), "spectral derivatives need a periodic grid");
    let v = scalar_velocity(&psi, &m, DerivativeMethod::CentralDifference).unwrap();
    let k = (2e-4f64).sqrt();
    for i in 0..grid.len() {
        assert!((v.vx[i] / k - 1.0).abs() < 1e-3);
        assert!(v.vy[i].abs() < 1e-12);
    }
}

#[test]
fn evanescent_mode_speed() {
    let m = medium(1e-3);
    let grid = Grid2D::new(64, 8, 40.0, 5.0, false).unwrap();
    let psi = stationary_mode(&ModeKind::Evanescent { detuning: -1e-3 }, &grid, &m).unwrap();
    let v = scalar_velocity(&psi, &m, DerivativeMethod::CentralDifference).unwrap();
    let expected = 1e-3 / (2.0 * (2e-3f64).sqrt());
    let i = grid.index(32, 4);
    assert!((v.vx[i] / expected - 1.0).abs() < 1e-3);
}

#[test]
fn step_flux_is_conserved_without_loss() {
    let m = medium(0.0);
    let s = StepSolution::new(0.02, 0.01, 0.0, &m).unwrap();
    let flux = |x: f64| (s.value(x).conj() * s.derivative(x)).im;
    assert!((flux(-3.0) - flux(3.0)).abs() < 1e-12);
    assert!((s.value(-1e-12) - s.value(1e-12)).norm() < 1e-9);
    let below = StepSolution::new(0.005, 0.01, 0.0, &m).unwrap();
    assert!((below.r.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn coarse_step_is_rejected() {
    let m = medium(0.0);
    let grid = make_grid(16, 16, 10.0, 10.0, true, true).unwrap();
    let pot = ComplexPotential::from_medium(RealField::from_fn(grid, |_, _| 2.0), &m);
    let cfg = PropagatorConfig::with_dt(0.1);
    let psi = ComplexScalarField::from_fn(grid, |_, _| C64::new(1.0, 0.0));
    assert!(matches!(propagate(&psi, &pot, &m, &cfg, 1), Err(Error::Config(_))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn lossless_split_step_is_unitary(kx in -2i32..3, ky in -2i32..3, v in prop::collection::vec(-0.05f64..0.05, 256)) {
        let m = medium(0.0);
        let grid = make_grid(16, 16, 8.0, 8.0, true, true).unwrap();
        let pot = ComplexPotential::from_medium(RealField::new(grid, v).unwrap(), &m);
        let k = 2.0 * std::f64::consts::PI / 8.0;
        let psi = ComplexScalarField::from_fn(grid, |x, y| (I * k * (kx as f64 * x + ky as f64 * y)).exp() * (1.0 + 0.3 * (k * x).cos()));
        let out = propagate(&psi, &pot, &m, &PropagatorConfig::with_dt(0.2), 10).unwrap();
        prop_assert!((out.norm_sqr() / psi.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
