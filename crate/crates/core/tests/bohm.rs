use cavityflow::bohm::{
    bell_jump_ensemble, integrate_trajectory, interrupt_trajectory, master_equation_rates, pauli_velocity,
    scalar_velocity, spin_density, wilson_interval, FnVelocity, JumpProcess, SnapshotVelocity, Termination,
    UniformVelocity, VelocityField2D,
};
use cavityflow::dynamics::analytic::GaussianPacket;
use cavityflow::{make_grid, CavityMedium, ComplexScalarField, DerivativeMethod, Error, SpinorField, C64, I};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn medium() -> CavityMedium {
    CavityMedium::from_mass(1.0, 0.0, 2.0, 1, 1e-3).unwrap()
}

#[test]
fn survival_matches_exponential_over_seeds() {
    let passes = (0..20u64)
        .filter(|&seed| {
            let c = bell_jump_ensemble(&JumpProcess::new(1.0, seed).unwrap(), 10_000, 0.0, 1.0, 0.01).unwrap();
            c.within_three_sigma(c.times.len() - 1)
        })
        .count();
    assert!(passes >= 19, "{passes}/20");
}

#[test]
fn ensembles_are_reproducible_and_guarded() {
    let j = JumpProcess::new(0.5, 42).unwrap();
    let a = bell_jump_ensemble(&j, 500, 0.0, 2.0, 0.05).unwrap();
    let b = bell_jump_ensemble(&j, 500, 0.0, 2.0, 0.05).unwrap();
    assert_eq!(a, b);
    assert!(a.fraction.windows(2).all(|w| w[1] <= w[0]));
    assert!(matches!(
        bell_jump_ensemble(&JumpProcess::new(5.0, 1).unwrap(), 10, 0.0, 1.0, 0.1),
        Err(Error::TimeStepTooCoarse { .. })
    ));
    let none = bell_jump_ensemble(&JumpProcess::new(0.0, 1).unwrap(), 10, 0.0, 1.0, 0.1).unwrap();
    assert!(none.fraction.iter().all(|&f| f == 1.0));
}

#[test]
fn wilson_interval_brackets_estimate() {
    let (lo, hi) = wilson_interval(3679, 10_000, 3.0);
    assert!(lo < 0.3679 && 0.3679 < hi);
    assert!(hi - lo < 0.03);
    assert_eq!(wilson_interval(0, 0, 3.0), (0.0, 1.0));
}

#[test]
fn jump_density_integrates_to_norm_loss() {
    let m = CavityMedium::from_mass(1.0, 0.01, 1.0, 1, 1e-3).unwrap();
    let grid = make_grid(32, 32, 20.0, 20.0, true, true).unwrap();
    let psi = GaussianPacket { x0: 0.0, y0: 0.0, sigma: 2.0, kx: 0.3, ky: 0.0 }.free(&grid, &m, 0.0);
    let rates = master_equation_rates(&psi, &m);
    let total: f64 = rates.loss.iter().sum::<f64>() * grid.cell_area();
    assert!((total / psi.norm_sqr() - m.loss_rate()).abs() < 1e-14);
    assert!(rates.source.iter().all(|&s| s == 0.0));
}

#[test]
fn rk4_follows_uniform_and_rotating_flows() {
    let t = integrate_trajectory(&UniformVelocity { vx: 0.3, vy: -0.1, cell: 1.0 }, (0.0, 0.0), 0.0, 10.0, 0.3).unwrap();
    let e = t.end();
    assert!((e.t - 10.0).abs() < 1e-12 && (e.x - 3.0).abs() < 1e-12 && (e.y + 1.0).abs() < 1e-12);

    let rot = FnVelocity { f: |_: f64, x: f64, y: f64| Some((-y, x)), cell: 1.0 };
    let t = integrate_trajectory(&rot, (1.0, 0.0), 0.0, 2.0 * std::f64::consts::PI, 0.01).unwrap();
    let e = t.end();
    assert!((e.x - 1.0).abs() < 1e-8 && e.y.abs() < 1e-8);
}

#[test]
fn trajectory_stops_at_domain_edge_and_explodes_loudly() {
    let grid = make_grid(16, 16, 10.0, 10.0, false, false).unwrap();
    let field = VelocityField2D::uniform(grid, 1.0, 0.0);
    let t = integrate_trajectory(&field, (0.0, 0.0), 0.0, 20.0, 0.1).unwrap();
    assert!(matches!(t.termination, Termination::LeftDomain { .. }));
    assert!(t.end().x <= 5.0);

    let fast = UniformVelocity { vx: 100.0, vy: 0.0, cell: 0.5 };
    assert!(matches!(integrate_trajectory(&fast, (0.0, 0.0), 0.0, 1.0, 0.1), Err(Error::StepExplosion { .. })));
}

#[test]
fn snapshot_interpolation_is_linear_in_time() {
    let grid = make_grid(8, 8, 10.0, 10.0, true, true).unwrap();
    let s = SnapshotVelocity::new(
        vec![0.0, 1.0],
        vec![VelocityField2D::uniform(grid, 0.0, 0.0), VelocityField2D::uniform(grid, 1.0, 0.0)],
    )
    .unwrap();
    let t = integrate_trajectory(&s, (0.0, 0.0), 0.0, 1.0, 0.1).unwrap();
    assert!((t.end().x - 0.5).abs() < 1e-12);
}

#[test]
fn jumps_cut_trajectories_reproducibly() {
    let t = integrate_trajectory(&UniformVelocity { vx: 0.1, vy: 0.0, cell: 1.0 }, (0.0, 0.0), 0.0, 100.0, 0.05).unwrap();
    let j = JumpProcess::new(0.1, 9).unwrap();
    let a = interrupt_trajectory(&t, &j, 3).unwrap();
    assert_eq!(a, interrupt_trajectory(&t, &j, 3).unwrap());
    assert!(matches!(a.termination, Termination::Jump { .. }));
}

fn random_field(grid: &cavityflow::Grid2D, rng: &mut ChaCha8Rng) -> ComplexScalarField {
    let k = 2.0 * std::f64::consts::PI / grid.lx();
    let c: Vec<C64> = (0..4).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    ComplexScalarField::from_fn(*grid, |x, y| {
        C64::new(2.5, 0.0) + c[0] * (I * k * x).exp() + c[1] * (I * k * y).exp() + c[2] * (I * 2.0 * k * (x - y)).exp() + c[3]
    })
}

#[test]
fn linear_polarisation_reduces_to_scalar_guidance() {
    let m = medium();
    let grid = make_grid(32, 32, 20.0, 20.0, true, true).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let psi = random_field(&grid, &mut rng);
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let spinor = SpinorField::cartesian(psi.scaled(ang.cos().into()), psi.scaled(ang.sin().into())).unwrap();
        let p = pauli_velocity(&spinor, &m, DerivativeMethod::Spectral).unwrap();
        let s = scalar_velocity(&psi, &m, DerivativeMethod::Spectral).unwrap();
        let scale = s.vx.iter().chain(&s.vy).fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..grid.len() {
            if s.mask[i] {
                assert!((p.total.vx[i] - s.vx[i]).abs() <= 1e-12 * scale);
                assert!((p.total.vy[i] - s.vy[i]).abs() <= 1e-12 * scale);
            }
        }
        assert!(spin_density(&spinor).max_abs() < 1e-12);
    }
}

#[test]
fn circular_spin_velocity_is_a_curl() {
    let m = medium();
    let grid = make_grid(64, 64, 40.0, 40.0, true, true).unwrap();
    let g = GaussianPacket { x0: 0.0, y0: 0.0, sigma: 3.0, kx: 0.0, ky: 0.0 }.free(&grid, &m, 0.0);
    let zero = ComplexScalarField::zeros(grid);
    let spinor = SpinorField::circular(g, zero).unwrap();
    let p = pauli_velocity(&spinor, &m, DerivativeMethod::Spectral).unwrap();
    // real Gaussian: no convective flow, azimuthal spin flow (dy s, -dx s)/(2 m rho)
    let (x, y) = (2.0, 1.0);
    let i = (0..grid.len()).min_by(|&a, &b| {
        let (xa, ya) = grid.coords(a);
        let (xb, yb) = grid.coords(b);
        ((xa - x).hypot(ya - y)).total_cmp(&(xb - x).hypot(yb - y))
    });
    let i = i.unwrap();
    let (xi, yi) = grid.coords(i);
    let mk = m.kinetic_mass();
    assert!(p.convective.vx[i].abs() < 1e-12);
    assert!((p.spin.vx[i] + yi / (mk * 9.0)).abs() < 1e-8);
    assert!((p.spin.vy[i] - xi / (mk * 9.0)).abs() < 1e-8);
}

proptest! {
    #![proptest_config(cfg(100))]
    #[test]
    fn spin_density_is_bounded(re in prop::collection::vec(-1.0f64..1.0, 128), im in prop::collection::vec(-1.0f64..1.0, 128)) {
        let grid = make_grid(8, 8, 1.0, 1.0, true, true).unwrap();
        let a: Vec<C64> = re[..64].iter().zip(&im[..64]).map(|(r, i)| C64::new(*r, *i)).collect();
        let b: Vec<C64> = re[64..].iter().zip(&im[64..]).map(|(r, i)| C64::new(*r, *i)).collect();
        let s = SpinorField::circular(ComplexScalarField::new(grid, a).unwrap(), ComplexScalarField::new(grid, b).unwrap()).unwrap();
        prop_assert!(spin_density(&s).max_abs() <= 0.5 + 1e-15);
    }

    #[test]
    fn wilson_interval_contains_point_estimate(k in 0usize..1000, extra in 0usize..1000) {
        let n = k + extra + 1;
        let (lo, hi) = wilson_interval(k, n, 3.0);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-15 && p <= hi + 1e-15);
    }
}
