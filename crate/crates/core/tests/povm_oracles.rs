//! Closed-form counting criteria against brute-force POVM evaluation on
//! truncated Fock states built from beam splitters, loss modes and click
//! detectors.

mod common;

use common::povm::*;
use qmemsim::certify::fock::{FockMixture, FockState};
use qmemsim::certify::*;
use qmemsim::C64;

#[test]
fn g2_memory_matches_povm() {
    for eta_d in ETA_D {
        for p_dc in P_DC {
            for eta_m in ETA_M {
                let det = DetectorModel::new(eta_d, p_dc, eta_m).unwrap();
                let closed = g2_memory(&det).unwrap().value;
                let oracle = g2_memory_oracle(&det);
                assert!((closed - oracle).abs() < TOL, "η_d={eta_d} p_dc={p_dc} η_m={eta_m}: {closed} vs {oracle}");
            }
        }
    }
}

#[test]
fn g2_2pe_matches_povm() {
    for d in [0.1, 0.5, 1.0] {
        for eta in [0.1, 0.5, 1.0] {
            for cond in [Conditioning::Absorbed, Conditioning::Unconditioned] {
                let closed = g2_2pe_with(d, eta, cond).unwrap();
                let oracle = g2_2pe_oracle(d, eta, cond);
                assert!((closed - oracle).abs() < TOL, "d={d} η={eta} {cond:?}: {closed} vs {oracle}");
            }
        }
    }
}

#[test]
fn two_pulse_click_probability_matches_number_distribution() {
    for d in [0.1f64, 0.5, 1.0] {
        for eta in [0.1, 0.5, 1.0] {
            let th = geometric(d.exp_m1(), 160);
            let mix = FockMixture::diagonal(&convolve(&th, &th));
            let oracle = povm_click(&mix, 0, eta, 0.0).unwrap();
            let closed = click_probability_2pe(d.exp(), eta).unwrap();
            assert!((closed - oracle).abs() < TOL);
        }
    }
}

#[test]
fn cauchy_schwarz_matches_povm() {
    for p in PAIR_P {
        for eta_d in ETA_D {
            for p_dc in P_DC {
                let a = DetectorModel::new(eta_d, p_dc, 0.5).unwrap();
                let b = DetectorModel::new(eta_d, p_dc, 1.0).unwrap();
                let closed = cauchy_schwarz(&a, &b, p).unwrap().value;
                let oracle = cauchy_schwarz_oracle(&a, &b, p);
                assert!(
                    ((closed - oracle) / closed).abs() < TOL,
                    "p={p} η_d={eta_d} p_dc={p_dc}: {closed} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn bell_visibility_matches_povm_in_any_analyser_basis() {
    for p in PAIR_P {
        for eta_d in ETA_D {
            for p_dc in P_DC {
                let a = DetectorModel::new(eta_d, p_dc, 0.5).unwrap();
                let b = DetectorModel::new(eta_d, p_dc, 1.0).unwrap();
                let closed = bell_visibility(&a, &b, p).unwrap().value;
                // The rotated basis mixes every term of the state; one detector
                // setting there is enough to show basis independence.
                let thetas: &[f64] = if eta_d == 0.6 { &[0.0, std::f64::consts::PI / 8.0] } else { &[0.0] };
                for &theta in thetas {
                    let oracle = bell_oracle(&a, &b, p, theta);
                    assert!((closed - oracle).abs() < TOL, "p={p} η_d={eta_d} p_dc={p_dc} θ={theta}: {closed} vs {oracle}");
                }
            }
        }
    }
}

#[test]
fn ideal_limits() {
    let ideal = DetectorModel::ideal();
    assert_eq!(g2_memory(&ideal).unwrap().value, 0.0);
    assert!((g2_2pe(1e-3, 1.0).unwrap() - 1.5).abs() < 1e-3);
    let p = 1e-3;
    let r = cauchy_schwarz(&ideal, &ideal, p).unwrap().value;
    let expect = 0.25 * (1.0 + 1.0 / p).powi(2);
    assert!(((r - expect) / expect).abs() < 5e-3, "{r} vs {expect}");
    for p in PAIR_P {
        let v = bell_visibility(&ideal, &ideal, p).unwrap().value;
        assert!((v - (1.0 - p) / (1.0 + p)).abs() < 1e-10);
    }
}

#[test]
fn click_probability_of_vacuum_is_dark_count() {
    let vac = FockMixture::pure(FockState::vacuum(1));
    assert!((povm_click(&vac, 0, 0.7, 0.02).unwrap() - 0.02).abs() < 1e-15);
    let one = FockMixture::pure(FockState::from_amplitudes(1, [(vec![1], C64::new(1.0, 0.0))]).unwrap());
    assert!((povm_click(&one, 0, 0.7, 0.0).unwrap() - 0.7).abs() < 1e-15);
}
