use depletion::classical::{
    design_matched_pulse, driven_voltage, envelope, matching_conditions, transient_voltage,
};
use depletion::numeric::{wrap_phase, TWO_PI};
use depletion::photons::{mean_energy, photon_count, spectral_density};
use depletion::quadrature::{integrate, Tolerance};
use depletion::quantum::{
    alpha_at_arrival, alpha_from_fill, expected_voltage, fill_from_alpha, photon_matching, resonator_amplitude,
};
use depletion::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

const OMEGA: f64 = TWO_PI * 10e9;

fn resonator(kappa_ratio: f64, omega: f64) -> ResonatorParams {
    ResonatorParams::from_frequency(omega, omega * kappa_ratio, 50.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn wrap_stays_half_open(x in -1e4f64..1e4) {
        let w = wrap_phase(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!(((x - w) / TWO_PI - ((x - w) / TWO_PI).round()).abs() < 1e-9);
    }

    #[test]
    fn transform_is_linear_in_amplitude(
        amp in 1e-6f64..1.0, scale in -5.0f64..5.0, phase in -PI..PI, periods in 1.0f64..200.0, frac in 0.0f64..1.2,
    ) {
        let params = resonator(1e-4, OMEGA);
        let width = periods * params.period();
        let pulse = Pulse::sinusoid(amp, OMEGA, phase, width, 0.3e-9).unwrap();
        let t = frac * width;
        let a = pulse.windowed_transform(params.pole(), t).unwrap();
        let b = pulse.scaled(scale).windowed_transform(params.pole(), t).unwrap();
        prop_assert!((b - a * scale).norm() <= 1e-12 * (a * scale).norm().max(1e-300));
    }

    #[test]
    fn driven_response_superposes(
        seed in prop::collection::vec(-1.0f64..1.0, 2..40), other in prop::collection::vec(-1.0f64..1.0, 2..40), t in 0.0f64..3e-9,
    ) {
        let params = resonator(1e-4, OMEGA);
        let dt = params.period() / 12.0;
        let len = seed.len().max(other.len());
        let pad = |v: &[f64]| { let mut v = v.to_vec(); v.resize(len, 0.0); v };
        let (a, b) = (pad(&seed), pad(&other));
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let mk = |s: Vec<f64>| Pulse::tabulated(dt, s, 0.0).unwrap();
        let va = driven_voltage(&params, &mk(a), t).unwrap();
        let vb = driven_voltage(&params, &mk(b), t).unwrap();
        let vs = driven_voltage(&params, &mk(sum), t).unwrap();
        prop_assert!((vs - va - vb).abs() <= 1e-9 * (va.abs() + vb.abs()).max(1e-12));
    }

    #[test]
    fn designed_pulse_depletes(
        v_fill in 1e-6f64..1e-2, theta in -PI..PI, t_fill in -200e-9f64..-1e-9,
        periods in 5.0f64..300.0, branch in -3i64..4,
    ) {
        let params = resonator(1e-4, OMEGA);
        let fill = FillState::new(v_fill, theta, t_fill).unwrap();
        let width = periods * params.period();
        let pulse = design_matched_pulse(&params, &fill, width, 100.0 / OMEGA, branch).unwrap();
        let before = fill.envelope_at_arrival(&params);
        let after = envelope(&params, &fill, &pulse, width).unwrap();
        prop_assert!(after < 1e-9 * before, "{} vs {}", after, before);
        let later = transient_voltage(&params, &fill, &pulse, width * 1.7).unwrap();
        prop_assert!(later.abs() < 1e-9 * before);
    }

    #[test]
    fn matching_phase_ignores_whole_turns(v in 1e-6f64..1e-2, theta in -PI..PI, turns in -4i32..5, t_fill in -1e-7f64..-1e-10) {
        let params = resonator(1e-4, OMEGA);
        let a = matching_conditions(&params, &FillState::new(v, theta, t_fill).unwrap(), 1);
        let b = matching_conditions(&params, &FillState::new(v, theta + TWO_PI * turns as f64, t_fill).unwrap(), 1);
        prop_assert!(wrap_phase(a.required_phase - b.required_phase).abs() < 1e-8);
        prop_assert!((a.required_magnitude - b.required_magnitude).abs() <= 1e-15 * a.required_magnitude);
    }

    #[test]
    fn quantum_expectation_follows_classical_voltage(
        v_fill in 1e-6f64..1e-2, theta in -PI..PI, t_fill in -50e-9f64..-1e-9,
        amp in 0.0f64..1e-3, phase in -PI..PI, periods in 2.0f64..150.0, probe in 0.0f64..2.0,
    ) {
        let params = resonator(1e-4, OMEGA);
        let fill = FillState::new(v_fill, theta, t_fill).unwrap();
        let pulse = Pulse::sinusoid(amp, OMEGA, phase, periods * params.period(), 1e-9).unwrap();
        let a0 = alpha_at_arrival(&params, alpha_from_fill(&params, &fill), fill.time);
        let t = probe * pulse.width();
        let quantum = expected_voltage(resonator_amplitude(&params, a0, &pulse, t).unwrap().alpha, &params);
        let classical = transient_voltage(&params, &fill, &pulse, t).unwrap();
        let scale = v_fill.max(envelope(&params, &fill, &pulse, t).unwrap());
        prop_assert!((quantum - classical).abs() <= 1e-9 * scale);
    }

    #[test]
    fn photon_matching_maps_to_classical_fill(amp in 1e-7f64..1e-2, phase in -PI..PI, periods in 2.0f64..100.0, t_fill in -80e-9f64..-1e-9) {
        let params = resonator(1e-4, OMEGA);
        let pulse = Pulse::sinusoid(amp, OMEGA, phase, periods * params.period(), 0.0).unwrap();
        let a0 = photon_matching(&params, &pulse).unwrap();
        let alpha_fill = a0 * (-params.pole().0 * t_fill).exp();
        let fill = fill_from_alpha(&params, alpha_fill, t_fill).unwrap();
        let want = matching_conditions(&params, &fill, 1);
        let got = pulse.laplace_at(params.pole()).unwrap();
        prop_assert!((got.norm() - want.required_magnitude).abs() <= 1e-12 * got.norm());
        prop_assert!(wrap_phase(got.arg() - want.required_phase).abs() <= 1e-9);
        // linear in the pulse amplitude
        let doubled = photon_matching(&params, &pulse.scaled(2.0)).unwrap();
        prop_assert!((doubled - a0 * 2.0).norm() <= 1e-12 * a0.norm());
    }

    #[test]
    fn passive_photon_decay(re in -50.0f64..50.0, im in -50.0f64..50.0, t in 0.0f64..1e-6) {
        let params = resonator(1e-4, OMEGA);
        let a0 = Complex64::new(re, im);
        let zero = Pulse::zero(1e-9, 0.0).unwrap();
        let n = resonator_amplitude(&params, a0, &zero, t).unwrap().photon_number();
        let want = a0.norm_sqr() * (-params.kappa() * t).exp();
        prop_assert!((n - want).abs() <= 1e-12 * a0.norm_sqr().max(1e-300));
    }

    #[test]
    fn spectral_density_is_normalized(z in 0.05f64..6.0, theta in -PI..PI, width in 1e8f64..1e11) {
        let spec = GaussianPulseSpec::new(z * width * 2f64.sqrt(), width, theta).unwrap();
        let top = spec.omega_p + 12.0 * width;
        let tol = Tolerance { abs: 1e-16, rel: 1e-12, max_depth: 50 };
        let total = integrate(|w| spectral_density(&spec, w), 0.0, top, tol);
        prop_assert!((total - 1.0).abs() < 1e-9, "{}", total);
    }

    #[test]
    fn energy_and_count_are_inverse(z in 0.01f64..30.0, theta in -PI..PI, energy in 0.0f64..1e-18) {
        let spec = GaussianPulseSpec::new(z * 2f64.sqrt() * 1e10, 1e10, theta).unwrap();
        for formula in [PhotonFormula::Corrected, PhotonFormula::Published] {
            let n = photon_count(&spec, energy, formula).unwrap();
            let back = mean_energy(&spec, n, formula).unwrap();
            prop_assert!((back - energy).abs() <= 1e-12 * energy.max(1e-300));
        }
    }
}
