use std::f64::consts::PI;

use cavityflow::leaky::{
    cavity_spectrum, fabry_perot_mode, fabry_perot_mode_expansion, image_field, leaky_field, pole_parameters, si,
    ImagingSetup, ReflectivityModel, SampledLine, SourceSpec,
};
use cavityflow::{CavityMedium, C64, I};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cavity of thickness 1 at order 4 whose mirrors have `r = -(1 - eta)`.
fn cavity(eta: f64) -> (CavityMedium, ReflectivityModel) {
    let m = CavityMedium::from_geometry(1.0, 0.0, 4, 1.0, eta).unwrap();
    (m, ReflectivityModel::from_eta(eta).unwrap())
}

#[test]
fn fabry_perot_expansion_is_second_order() {
    for eta in [1e-3, 1e-2, 5e-2] {
        let (m, r) = cavity(eta);
        let exact = fabry_perot_mode(&r, m.d0, m.q).unwrap();
        let approx = fabry_perot_mode_expansion(eta, m.d0, m.q);
        assert!((exact - approx).norm() <= eta * eta / m.d0, "eta = {eta}");
        let p = pole_parameters(0.02, &m).unwrap();
        assert!(p.is_leaky());
        assert!((exact - p.kz).norm() <= eta * eta / m.d0 + 0.02 / m.mass * p.kz.norm());
    }
}

#[test]
fn resonance_width_matches_pole() {
    for eta in [1e-2, 1e-3] {
        let (m, r) = cavity(eta);
        let e = 0.02;
        let p = pole_parameters(e, &m).unwrap();
        let src = SourceSpec { i0: 1.0, d: 0.01 };
        let omega = m.mass + e;
        let spec = |k: f64| cavity_spectrum(k, omega, &m, &r, &src).norm_sqr();
        let n = 200_000;
        let (lo, hi) = (p.kx.re - 6.0 * p.kx.im, p.kx.re + 6.0 * p.kx.im);
        let ks: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let vals: Vec<f64> = ks.iter().map(|&k| spec(k)).collect();
        let (imax, vmax) = vals.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let left = (0..imax).rev().find(|&i| vals[i] < 0.5 * vmax).unwrap();
        let right = (imax..=n).find(|&i| vals[i] < 0.5 * vmax).unwrap();
        let hw = 0.5 * (ks[right] - ks[left]);
        println!("eta {eta}: half-width {hw}, Im kxP {}", p.kx.im);
        assert!((hw / p.kx.im - 1.0).abs() <= 0.1);
    }
}

fn random_object(rng: &mut ChaCha8Rng) -> SampledLine {
    let k = C64::new(rng.gen_range(0.05..0.4), rng.gen_range(0.12..0.3));
    let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let g: Vec<(f64, f64, f64)> = (0..3).map(|_| (rng.gen_range(-20.0..20.0), rng.gen_range(1.0..4.0), rng.gen_range(-1.0..1.0))).collect();
    SampledLine::from_fn(-120.0, 0.1, 2401, |x| {
        amp * (I * k * x.abs()).exp() + g.iter().map(|(c, w, a)| a * (-(x - c) * (x - c) / (2.0 * w * w)).exp()).sum::<f64>()
    })
}

#[test]
fn imaging_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let line = random_object(&mut rng);
        let setup = ImagingSetup::new(rng.gen_range(0.2..0.9), rng.gen_range(1.0..20.0));
        let xo: Vec<f64> = (0..121).map(|i| setup.magnification * (-30.0 + 0.5 * i as f64)).collect();
        let img = image_field(&line, &setup, 1.0 + 1e-3, 1.0, &xo).unwrap();
        assert!(img.agreement <= 1e-6, "{}", img.agreement);
        assert!(img.warnings.is_empty());
    }
}

#[test]
fn pupil_removes_out_of_band_content() {
    // in-band tone passes unchanged (mirrored and magnified), out-of-band tone is removed
    let g = |x: f64| (-x * x / (2.0 * 400.0)).exp();
    let inband = |x: f64| g(x) * (I * 0.3 * x).exp();
    let line = SampledLine::from_fn(-200.0, 0.1, 4001, |x| inband(x) + g(x) * (I * 1.4 * x).exp());
    let setup = ImagingSetup::new(0.8, 3.0);
    let xo: Vec<f64> = (0..241).map(|i| 3.0 * (-30.0 + 0.25 * i as f64)).collect();
    let img = image_field(&line, &setup, 1.0, 1.0, &xo).unwrap();
    let num: f64 = img.convolution.iter().zip(&xo).map(|(v, x)| (v - inband(-x / 3.0)).norm_sqr()).sum();
    let den: f64 = xo.iter().map(|x| inband(-x / 3.0).norm_sqr()).sum();
    assert!((num / den).sqrt() < 1e-6, "{}", (num / den).sqrt());
}

#[test]
fn pole_field_decays_along_x_and_rays() {
    let m = CavityMedium::from_mass(1.0, 0.0, 1.0, 46, 1e-3).unwrap();
    let p = pole_parameters(1e-4, &m).unwrap();
    let r = ReflectivityModel::new((-(m.gamma * m.d0)).exp(), PI).unwrap();
    let s = SourceSpec { i0: 1.0, d: 0.01 * m.d0 };
    let z = 0.3 * m.d0;
    let a = leaky_field(&p, &s, &r, 100.0, z).unwrap();
    let b = leaky_field(&p, &s, &r, 200.0, z).unwrap();
    assert!(a.valid && b.valid);
    let ratio = b.value.norm() / a.value.norm();
    assert!((ratio - (-p.kx.im * 100.0).exp()).abs() < 1e-12 * ratio.max(1e-300));

    // outside the cavity, just beyond the cutoff, the field vanishes along the ray
    let phi = 1.5 * p.xi.re;
    let mut last = f64::INFINITY;
    for rho in [1e3, 1e4, 1e5, 1e6] {
        let v = leaky_field(&p, &s, &r, rho * phi.sin(), rho * phi.cos()).unwrap();
        assert!(v.valid);
        assert!(v.value.norm() < last);
        last = v.value.norm();
    }
    assert!(last < 1e-20);
}

#[test]
fn laboratory_evanescent_speed() {
    let v = si::evanescent_velocity_si(270e-12, -0.04e-3, 600e-9).unwrap();
    assert!((v / 3.0e4 - 1.0).abs() <= 0.2, "{v}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn constructed_poles_are_leaky(e in 1e-5f64..1e-2, g in 1e-6f64..1e-3, epp in 0.0f64..1e-3, ep in 1.0f64..4.0) {
        let m = CavityMedium::from_mass(ep, epp, 1.0, 10, g).unwrap();
        let p = pole_parameters(e, &m).unwrap();
        prop_assert!(p.kx.re > 0.0 && p.kx.im > 0.0);
        prop_assert!(p.kz.re > 0.0 && p.kz.im < 0.0);
    }

    #[test]
    fn closed_form_mode_solves_condition(mag in 0.05f64..1.0, phase in -3.0f64..3.0, q in 1u32..50, d in 0.1f64..10.0) {
        let r = ReflectivityModel::new(mag, phase).unwrap();
        let kz = fabry_perot_mode(&r, d, q).unwrap();
        let res = 1.0 + r.r0() * (2.0 * I * kz * d).exp();
        prop_assert!(res.norm() < 1e-9);
    }
}
