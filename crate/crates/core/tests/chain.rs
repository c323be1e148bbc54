//! The atomic-chain toy model against its large-N limits, and its agreement
//! with the beam-splitter picture behind the T–V criterion.

use proptest::prelude::*;
use qmemsim::certify::*;

const ATOMS: [usize; 3] = [10, 50, 200];
const DEPTHS: [f64; 2] = [0.5, 2.0];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Relative errors of (absorption, forward, backward) against the limits.
fn storage_errors(atoms: usize, d: f64) -> [f64; 3] {
    let m = ChainModel::new(atoms, d).unwrap();
    let fwd = chain_efficiency(&m, ChainDirection::Forward).unwrap();
    let bwd = chain_efficiency(&m, ChainDirection::Backward).unwrap();
    [rel(fwd.absorption, fwd.absorption_limit), rel(fwd.exact, fwd.limit), rel(bwd.exact, bwd.limit)]
}

#[test]
fn storage_converges_to_continuum_limits() {
    for d in DEPTHS {
        let errs: Vec<[f64; 3]> = ATOMS.iter().map(|&n| storage_errors(n, d)).collect();
        for k in 0..3 {
            assert!(errs[0][k] > errs[1][k] && errs[1][k] > errs[2][k], "d={d}: {errs:?}");
            assert!(errs[2][k] < 0.02, "d={d}, N=200: {errs:?}");
        }
    }
}

#[test]
fn state_vector_matches_finite_n_closed_forms() {
    for n in ATOMS {
        for d in DEPTHS {
            let m = ChainModel::new(n, d).unwrap();
            for dir in [ChainDirection::Forward, ChainDirection::Backward] {
                let e = chain_efficiency(&m, dir).unwrap();
                assert!((e.exact - e.closed_form).abs() < 1e-12, "N={n} d={d} {dir:?}");
            }
        }
    }
}

#[test]
fn inverted_chain_approaches_amplifier_gain() {
    for d in DEPTHS {
        let mut last = f64::INFINITY;
        for n in ATOMS {
            let e = inverted_emission_exact(&ChainModel::new(n, d).unwrap(), n).unwrap();
            let err = rel(e.exact, e.limit);
            assert!(err < last, "d={d} N={n}: {err}");
            last = err;
            // Depletion of the inversion only removes light.
            assert!(e.exact <= e.bosonic + 1e-12);
        }
        let bosonic = inverted_emission_exact(&ChainModel::new(200, d).unwrap(), 200).unwrap();
        assert!(rel(bosonic.bosonic, bosonic.limit) < 0.02);
    }
}

#[test]
fn excitations_are_conserved_in_a_long_chain() {
    let m = ChainModel::new(200, 2.0).unwrap();
    for dir in [ChainDirection::Forward, ChainDirection::Backward] {
        let out = chain_propagate(&FockChainState::ground(200, 1, 1).unwrap(), &m, dir).unwrap();
        let sectors = out.excitation_sectors();
        assert_eq!(sectors.len(), 1);
        assert!((sectors[&1] - 1.0).abs() < 1e-12);
    }
    let m = ChainModel::new(12, 2.0).unwrap();
    let out = chain_propagate(&FockChainState::inverted(12, 12).unwrap(), &m, ChainDirection::Forward).unwrap();
    assert!((out.excitation_sectors()[&12] - 1.0).abs() < 1e-12);
}

#[test]
fn crib_transfer_is_twice_backward_chain_efficiency() {
    for i in 0..50 {
        let d = 0.1 * (i + 1) as f64;
        let t = tv_criterion(&TvProtocol::Crib { d }).unwrap().value;
        let chain = chain_efficiency(&ChainModel::new(50, d).unwrap(), ChainDirection::Backward).unwrap();
        assert!((t / 2.0 - chain.limit).abs() < 1e-10);
    }
}

#[test]
fn g2_memory_monotone_on_a_scan() {
    let mut prev_noise = -1.0;
    for i in 0..50 {
        let p_dc = 0.02 * i as f64;
        let g = g2_memory(&DetectorModel::new(0.5, p_dc, 0.8).unwrap()).unwrap().value;
        assert!(g >= prev_noise);
        prev_noise = g;
    }
    let mut prev_eff = f64::INFINITY;
    for i in 1..=50 {
        let eta_d = 0.02 * i as f64;
        let g = g2_memory(&DetectorModel::new(eta_d, 0.01, 0.8).unwrap()).unwrap().value;
        assert!(g < prev_eff);
        prev_eff = g;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagation_is_unitary_and_conserving(atoms in 1usize..12, d in 0.0..4.0f64, photons in 0u32..3, backward in any::<bool>()) {
        let m = ChainModel::new(atoms, d).unwrap();
        let dir = if backward { ChainDirection::Backward } else { ChainDirection::Forward };
        let start = FockChainState::ground(atoms, photons, 8).unwrap();
        let out = chain_propagate(&start, &m, dir).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let sectors = out.excitation_sectors();
        prop_assert_eq!(sectors.len(), 1);
        prop_assert!((sectors[&(photons as usize)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn traced_statistics_are_normalised(atoms in 1usize..60, d in 0.0..2.0f64, inverted in any::<bool>()) {
        let m = ChainModel::new(atoms, d).unwrap();
        let p = chain_photon_statistics(&m, inverted, &[0.0, 1.0], atoms + 1).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= -1e-15));
    }

    #[test]
    fn g2_memory_monotone(eta_d in 0.05..1.0f64, eta_m in 0.05..1.0f64, p1 in 0.0..0.5f64, dp in 1e-4..0.5f64, s in 0.1..0.99f64) {
        let g = |eta_d: f64, p_dc: f64, eta_m: f64| g2_memory(&DetectorModel::new(eta_d, p_dc, eta_m).unwrap()).unwrap().value;
        prop_assert!(g(eta_d, p1 + dp, eta_m) >= g(eta_d, p1, eta_m));
        if p1 > 0.0 {
            prop_assert!(g(eta_d * s, p1, eta_m) > g(eta_d, p1, eta_m));
            prop_assert!(g(eta_d, p1, eta_m * s) > g(eta_d, p1, eta_m));
        }
    }

    #[test]
    fn bell_visibility_is_bounded(p in 1e-4..0.99f64, eta in 0.01..1.0f64, p_dc in 0.0..0.3f64) {
        let det = DetectorModel::new(eta, p_dc, 1.0).unwrap();
        let v = bell_visibility(&det, &det, p).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&v));
        // dark counts only wash the fringes out
        let noisier = DetectorModel::new(eta, p_dc + 0.05, 1.0).unwrap();
        prop_assert!(bell_visibility(&noisier, &noisier, p).unwrap().value < v);
    }
}
