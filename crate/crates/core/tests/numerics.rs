//! Propagation physics against independent references: closed-form echo
//! laws, the area theorem, and frequency-domain transfer functions.

mod common;

use proptest::prelude::*;
use qmemsim::echo::{analytic_efficiency, area_theorem_reference, EchoProtocol};
use qmemsim::numcore::*;
use qmemsim::slowlight::SlowLightProtocol;
use std::f64::consts::PI;

#[test]
fn closed_form_laws() {
    for d in [0.0, 0.5, 1.0, 2.0, 4.0, 6.0] {
        let sinh = (d / 2.0f64).sinh();
        assert!((analytic_efficiency(EchoProtocol::TwoPulse, d) - 4.0 * sinh * sinh).abs() < 1e-12);
        assert!((analytic_efficiency(EchoProtocol::CribFwd, d) - d * d * (-d).exp()).abs() < 1e-12);
        assert!((analytic_efficiency(EchoProtocol::CribBwd, d) - (1.0 - (-d).exp()).powi(2)).abs() < 1e-12);
    }
    // forward maximum at d = 2
    let peak = analytic_efficiency(EchoProtocol::CribFwd, 2.0);
    assert!((peak - 0.5413411329464508).abs() < 1e-12);
    for d in [1.9, 1.99, 2.01, 2.1] {
        assert!(analytic_efficiency(EchoProtocol::CribFwd, d) < peak);
    }
    assert!(analytic_efficiency(EchoProtocol::TwoPulse, -1.0).is_nan());
}

#[test]
fn simulated_forward_crib_follows_closed_form() {
    for d in [0.5, 1.0, 2.0, 4.0] {
        let r = common::crib_forward(d);
        let rel = (r.numeric - r.analytic).abs() / r.analytic;
        assert!(rel < 0.02, "d={d}: {} vs {}", r.numeric, r.analytic);
        assert!((r.echo_time - 20.0).abs() < 0.5);
    }
}

#[test]
fn weak_pulse_area_decays_as_beer_law() {
    for d in [0.5, 1.0, 2.0] {
        let ratio = common::small_area_ratio(d);
        let expect = (-d / 2.0f64).exp();
        assert!((ratio - expect).abs() / expect < 0.02, "d={d}: {ratio} vs {expect}");
    }
}

#[test]
fn area_theorem_reference_fixed_points() {
    for d in [0.5, 2.0, 10.0] {
        for (_, theta) in area_theorem_reference(PI, d, 200) {
            assert_eq!(theta, PI);
        }
        assert!(area_theorem_reference(0.0, d, 200).iter().all(|&(_, t)| t == 0.0));
        // small areas follow exp(-d z/2)
        let last = area_theorem_reference(1e-6, d, 200).last().unwrap().1;
        assert!((last / 1e-6 - (-d / 2.0f64).exp()).abs() < 1e-9);
        // areas between π and 3π are drawn to 2π
        let to_two_pi = area_theorem_reference(1.5 * PI, d, 200).last().unwrap().1;
        assert!(to_two_pi > 1.5 * PI && to_two_pi < 2.0 * PI);
    }
}

#[test]
fn sech_two_pi_pulse_keeps_its_area() {
    let drift = common::sech_2pi_area_drift(2.0);
    assert!(drift < 0.01, "relative area drift {drift}");
}

#[test]
fn no_storage_runs_match_transfer_functions() {
    for p in [SlowLightProtocol::Fid, SlowLightProtocol::Eit, SlowLightProtocol::Raman] {
        let (energy, wave) = common::reference_equivalence(&common::reference_scenario(p));
        assert!(energy < 0.01 && wave < 0.01, "{p:?}: energy {energy:e}, waveform {wave:e}");
    }
}

#[test]
fn bessel_impulse_response_matches_transfer_function() {
    for (d, gamma0, sigma) in [(20.0, 1.0, 0.05), (5.0, 1.0, 0.2)] {
        let m = common::bessel_tail_mismatch(d, gamma0, sigma);
        assert!(m < 0.01, "d={d}: tail mismatch {m:e}");
    }
}

#[test]
fn archetype_delays() {
    let sig = PulseShape::gaussian(0.0, 10.0, 0.01);
    let r = qmemsim::slowlight::run_transfer_archetype(&TransferFunction::inverted_lorentzian(20.0, 1.0), &sig, 5.0, 20.0)
        .unwrap();
    assert!((r.group_delay - 10.0).abs() < 0.5, "{}", r.group_delay);
    assert!((r.shaded_area - 0.43).abs() < 0.02, "{}", r.shaded_area);
    let sig = PulseShape::gaussian(0.0, 0.05, 0.01);
    let r = qmemsim::slowlight::run_transfer_archetype(&TransferFunction::lorentzian(20.0, 1.0), &sig, 0.05, 20.0).unwrap();
    assert!((r.shaded_area - 0.32).abs() < 0.02, "{}", r.shaded_area);
}

fn grid() -> TimeGrid {
    TimeGrid::new(-40.0, 0.05, 2048).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fourier_round_trip(center in -10.0..10.0f64, width in 0.5..4.0f64, area in -3.0..3.0f64) {
        let env = PulseShape::gaussian(center, width, area).render(&grid()).unwrap();
        let back = inverse_transform(&forward_transform(&env));
        let err = env.minus(&back).energy();
        prop_assert!(err <= 1e-24 * env.energy().max(1e-30) + 1e-30);
        prop_assert!((forward_transform(&env).energy() - env.energy()).abs() <= 1e-12 * env.energy());
    }

    #[test]
    fn rendered_area_is_requested(center in -10.0..10.0f64, width in 0.5..4.0f64, area in 0.01..7.0f64, square in any::<bool>()) {
        let p = if square { PulseShape::square(center, width, area) } else { PulseShape::gaussian(center, width, area) };
        let a = p.render(&grid()).unwrap().area().re;
        prop_assert!((a - area).abs() <= 1e-6 * area);
    }

    #[test]
    fn absorber_never_adds_energy(d in 0.0..30.0f64, gamma0 in 0.1..5.0f64, width in 1.0..4.0f64) {
        let env = PulseShape::gaussian(0.0, width, 0.1).render(&grid()).unwrap();
        let tf = TransferFunction::lorentzian(d, gamma0);
        if let Ok(out) = apply_transfer(&env, &tf) {
            prop_assert!(out.energy() <= env.energy() * (1.0 + 1e-12));
        }
        let hole = apply_transfer(&env, &TransferFunction::inverted_lorentzian(d, gamma0));
        if let Ok(out) = hole {
            prop_assert!(out.energy() <= env.energy() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_depth_is_identity(width in 0.5..4.0f64, gamma in 0.5..5.0f64, rabi in 0.0..5.0f64) {
        let env = PulseShape::gaussian(0.0, width, 0.1).render(&grid()).unwrap();
        for tf in [TransferFunction::lorentzian(0.0, gamma), TransferFunction::eit(0.0, gamma, rabi)] {
            let out = apply_transfer(&env, &tf).unwrap();
            prop_assert!(out.minus(&env).energy() <= 1e-24 * env.energy());
        }
    }
}
