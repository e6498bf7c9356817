//! Cross-module invariants over randomized operating points.

use std::f64::consts::PI;

use omring_core::analysis::{isolation_bandwidth, toy_isolation_bandwidth, DEFAULT_THRESHOLD};
use omring_core::model::{
    cancellation_drive_shifted, steady_state_pump_shifted, DeviceParams, LinearizedModel, PumpDrive,
};
use omring_core::noise::{noise_power, noise_spectral_density, Band, NoiseMethod};
use omring_core::solver::Scatterer;
use omring_core::squeezing::SqueezingModel;
use omring_core::toy::ToyModel;
use omring_core::{Channel, C64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pump_ratio_law(
        beta in 0.0..5.0f64,
        phase in -PI..PI,
        delta in -30.0..30.0f64,
        kappa in 0.1..3.0f64,
        kappa_in in 0.0..3.0f64,
        drive in 0.1..100.0f64,
    ) {
        let b = C64::from_polar(beta, phase);
        let p = DeviceParams::new(20.0, kappa).with_kappa_in(kappa_in).with_beta(b);
        let s = steady_state_pump_shifted(&p, &PumpDrive::right(drive), delta).unwrap();
        let kt = p.kappa_t();
        let expected = beta / (delta * delta + kt * kt).sqrt();
        let got = (s.alpha_l / s.alpha_r).norm();
        prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300) + 1e-15);

        let left = cancellation_drive_shifted(&p, delta, C64::new(drive, 0.0));
        let c = steady_state_pump_shifted(&p, &PumpDrive::both(drive, left), delta).unwrap();
        prop_assert!(c.alpha_l.norm() < 1e-12 * c.alpha_r.norm());
    }

    #[test]
    fn squeezing_closed_form_matches_solver(
        g in 0.1..8.0f64,
        kappa_in in 0.0..2.0f64,
        delta in -10.0..10.0f64,
    ) {
        let omega_m = 30.0;
        let model = LinearizedModel::red_sideband(omega_m, g, 1.0, kappa_in, 0.0);
        prop_assume!(Scatterer::new(&model).is_ok());
        let s = Scatterer::new(&model).unwrap().at_detuning(delta).unwrap();
        let pair = SqueezingModel::new(1.0, kappa_in, g, omega_m).at_detuning(delta).unwrap();
        let a = s.get(Channel::Wg1Right, Channel::Wg1Right);
        let e = s.conjugate(Channel::Wg1Right, Channel::Wg1Right);
        prop_assert!((pair.alpha - a).norm() <= 1e-10 * a.norm().max(1e-3));
        prop_assert!((pair.eta - e).norm() <= 1e-10 * e.norm().max(1e-6));
    }

    #[test]
    fn toy_and_full_bandwidths_converge_deep_in_sideband_regime(g in 2.0..8.0f64) {
        let toy = ToyModel::new(1.0, 1.0, 0.0, g);
        let full = LinearizedModel::red_sideband(2000.0, g, 1.0, 1.0, 0.0);
        let a = toy_isolation_bandwidth(&toy, DEFAULT_THRESHOLD).unwrap().width;
        let b = isolation_bandwidth(&full, DEFAULT_THRESHOLD).unwrap().width;
        prop_assert!((a - b).abs() < 0.02 * a, "toy {a} full {b}");
    }
}

#[test]
fn noise_flux_is_affine_in_occupation() {
    let model = LinearizedModel::red_sideband(40.0, 3.0, 1.0, 1.0, 0.02);
    let band = Band::centered(40.0, 6.0);
    let f = |n: f64| noise_power(&model, n, band).unwrap();
    let (f0, f1, f2) = (f(0.0), f(50.0), f(100.0));
    let d1 = f1.flux_exact - f0.flux_exact;
    let d2 = f2.flux_exact - f1.flux_exact;
    assert!((d1 - d2).abs() < 1e-6 * d1);
    assert!((f2.flux_approx - 2.0 * f1.flux_approx).abs() < 1e-9 * f2.flux_approx);
}

#[test]
fn exact_noise_density_tracks_closed_form_in_band() {
    // omega_m = 20 kappa_t
    let model = LinearizedModel::red_sideband(40.0, 1.0, 1.0, 1.0, 0.01);
    for i in 0..=20 {
        let w = 39.0 + i as f64 * 0.1;
        let e = noise_spectral_density(&model, 100.0, w, NoiseMethod::Exact).unwrap();
        let a = noise_spectral_density(&model, 100.0, w, NoiseMethod::Approx).unwrap();
        assert!((e / a - 1.0).abs() < 0.2, "omega {w}: exact {e} approx {a}");
    }
}
