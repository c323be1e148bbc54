//! Brute-force photon-counting oracles: truncated Fock states pushed through
//! beam splitters, loss modes and click detectors.

use qmemsim::certify::fock::{ClickDetector, FockMixture, FockState};
use qmemsim::certify::*;

pub const TOL: f64 = 1e-10;
pub const ETA_D: [f64; 3] = [0.2, 0.6, 1.0];
pub const P_DC: [f64; 3] = [0.0, 1e-3, 0.05];
pub const ETA_M: [f64; 3] = [0.3, 0.7, 1.0];
pub const PAIR_P: [f64; 3] = [0.01, 0.05, 0.1];

/// Smallest cutoff whose discarded pair weight p^{n+1} is below 1e-13.
pub fn n_max(p: f64) -> usize {
    (1e-13f64.ln() / p.ln()).ceil() as usize
}

fn click(state: &FockMixture, dets: &[ClickDetector]) -> f64 {
    povm_joint_click(state, dets).unwrap()
}

/// Single photon → memory loss (BS onto a loss mode) → 50/50 BS → two detectors.
pub fn g2_memory_oracle(det: &DetectorModel) -> f64 {
    let s = FockState::number(3, 0, 1).unwrap();
    let s = s.beam_splitter(0, 1, det.eta_m).unwrap();
    let s = FockMixture::pure(s.beam_splitter(0, 2, 0.5).unwrap());
    let a = ClickDetector::new(0, det.eta_d, det.p_dc).unwrap();
    let b = ClickDetector::new(2, det.eta_d, det.p_dc).unwrap();
    click(&s, &[a, b]) / (click(&s, &[a]) * click(&s, &[b]))
}

pub fn geometric(mean: f64, n_max: usize) -> Vec<f64> {
    let x = mean / (1.0 + mean);
    (0..=n_max).map(|n| x.powi(n as i32) / (1.0 + mean)).collect()
}

pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Echo photon statistics as a number distribution (two thermal modes of mean
/// e^d − 1 after absorption, one otherwise), split 50/50 onto two detectors.
pub fn g2_2pe_oracle(d: f64, eta: f64, conditioning: Conditioning) -> f64 {
    let n_max = 160;
    let nbar = d.exp_m1();
    let th = geometric(nbar, n_max);
    let two = convolve(&th, &th);
    let w = match conditioning {
        Conditioning::Absorbed => 1.0,
        Conditioning::Unconditioned => 1.0 - (-d).exp(),
    };
    let probs: Vec<f64> = two.iter().zip(&th).map(|(a, b)| w * a + (1.0 - w) * b).collect();
    let mix = with_modes(FockMixture::diagonal(&probs), 2);
    let mix = mix.map(|s| s.beam_splitter(0, 1, 0.5)).unwrap();
    let a = ClickDetector::new(0, eta, 0.0).unwrap();
    let b = ClickDetector::new(1, eta, 0.0).unwrap();
    click(&mix, &[a, b]) / (click(&mix, &[a]) * click(&mix, &[b]))
}

fn with_modes(mix: FockMixture, modes: usize) -> FockMixture {
    let extra = modes - mix.components[0].1.modes();
    FockMixture { components: mix.components.into_iter().map(|(w, s)| (w, s.with_vacuum_modes(extra))).collect() }
}

/// Arm with a memory: loss mode at transmission η_m, then a 50/50 splitter.
/// Modes: [x, loss, x2].
fn arm_ops(state: FockState, x: usize, loss: usize, x2: usize, eta_m: f64) -> FockState {
    state.beam_splitter(x, loss, eta_m).unwrap().beam_splitter(x, x2, 0.5).unwrap()
}

pub fn cauchy_schwarz_oracle(a: &DetectorModel, b: &DetectorModel, p: f64) -> f64 {
    // [a, b, a_loss, a2, b_loss, b2]
    let s = FockState::two_mode_squeezed(p, n_max(p)).unwrap().with_vacuum_modes(4);
    let s = arm_ops(s, 0, 2, 3, a.eta_m);
    let s = FockMixture::pure(arm_ops(s, 1, 4, 5, b.eta_m));
    let da = |m| ClickDetector::new(m, a.eta_d, a.p_dc).unwrap();
    let db = |m| ClickDetector::new(m, b.eta_d, b.p_dc).unwrap();
    let g = |x: ClickDetector, y: ClickDetector| click(&s, &[x, y]) / (click(&s, &[x]) * click(&s, &[y]));
    let g_ab = g(da(0), db(1));
    g_ab * g_ab / (g(da(0), da(3)) * g(db(1), db(5)))
}

/// Polarisation pairs [ah, av, bh, bv]; side a passes the memory (loss modes
/// on both polarisations); both sides rotate their analyser by `theta` with a
/// polarisation beam splitter. Coincidences between the rotated `h` output on a
/// and the rotated `h` (minimum) or `v` (maximum) output on b.
pub fn bell_oracle(a: &DetectorModel, b: &DetectorModel, p: f64, theta: f64) -> f64 {
    let t = theta.cos().powi(2);
    // + [ah_loss, av_loss, bh_loss, bv_loss]
    let s = FockState::polarization_pairs(p, n_max(p)).unwrap().with_vacuum_modes(4);
    let s = s.beam_splitter(0, 4, a.eta_m).unwrap().beam_splitter(1, 5, a.eta_m).unwrap();
    let s = s.beam_splitter(2, 6, b.eta_m).unwrap().beam_splitter(3, 7, b.eta_m).unwrap();
    let s = FockMixture::pure(s.beam_splitter(0, 1, t).unwrap().beam_splitter(2, 3, t).unwrap());
    let ah = ClickDetector::new(0, a.eta_d, a.p_dc).unwrap();
    let bh = ClickDetector::new(2, b.eta_d, b.p_dc).unwrap();
    let bv = ClickDetector::new(3, b.eta_d, b.p_dc).unwrap();
    let (cmax, cmin) = (click(&s, &[ah, bv]), click(&s, &[ah, bh]));
    (cmax - cmin) / (cmax + cmin)
}

/// Largest closed-form-vs-oracle deviation of each criterion on the
/// 3×3×3 grids: `[g2_memory, g2_2pe, cauchy_schwarz (relative), bell]`.
/// `bell_theta` adds a rotated analyser basis to every Bell point.
pub fn worst_deviations(bell_theta: Option<f64>) -> [f64; 4] {
    let mut worst = [0.0f64; 4];
    for eta_d in ETA_D {
        for p_dc in P_DC {
            for eta_m in ETA_M {
                let det = DetectorModel::new(eta_d, p_dc, eta_m).unwrap();
                worst[0] = worst[0].max((g2_memory(&det).unwrap().value - g2_memory_oracle(&det)).abs());
            }
        }
    }
    for d in [0.1, 0.5, 1.0] {
        for eta in [0.1, 0.5, 1.0] {
            for cond in [Conditioning::Absorbed, Conditioning::Unconditioned] {
                let dev = (g2_2pe_with(d, eta, cond).unwrap() - g2_2pe_oracle(d, eta, cond)).abs();
                worst[1] = worst[1].max(dev);
            }
        }
    }
    for p in PAIR_P {
        for eta_d in ETA_D {
            for p_dc in P_DC {
                let a = DetectorModel::new(eta_d, p_dc, 0.5).unwrap();
                let b = DetectorModel::new(eta_d, p_dc, 1.0).unwrap();
                let r = cauchy_schwarz(&a, &b, p).unwrap().value;
                worst[2] = worst[2].max(((r - cauchy_schwarz_oracle(&a, &b, p)) / r).abs());
                let v = bell_visibility(&a, &b, p).unwrap().value;
                let thetas = [Some(0.0), bell_theta];
                for theta in thetas.into_iter().flatten() {
                    worst[3] = worst[3].max((v - bell_oracle(&a, &b, p, theta)).abs());
                }
            }
        }
    }
    worst
}
