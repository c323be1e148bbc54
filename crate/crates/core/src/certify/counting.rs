//! Photon-counting certification criteria with noisy non-number-resolving detectors.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Detector arm: efficiency, dark-count probability and the efficiency of the
/// memory placed before it (1 for an arm without memory).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    pub eta_d: f64,
    pub p_dc: f64,
    #[serde(default = "one")]
    pub eta_m: f64,
}

fn one() -> f64 {
    1.0
}

impl DetectorModel {
    pub fn new(eta_d: f64, p_dc: f64, eta_m: f64) -> Result<Self> {
        let d = Self { eta_d, p_dc, eta_m };
        d.validate()?;
        Ok(d)
    }

    pub fn ideal() -> Self {
        Self { eta_d: 1.0, p_dc: 0.0, eta_m: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta_d) || !(0.0..=1.0).contains(&self.eta_m) {
            return Err(Error::InvalidParameter(format!(
                "efficiencies must lie in [0, 1], got η_d={}, η_m={}",
                self.eta_d, self.eta_m
            )));
        }
        if !(0.0..1.0).contains(&self.p_dc) {
            return Err(Error::InvalidParameter(format!("dark-count probability must lie in [0, 1), got {}", self.p_dc)));
        }
        Ok(())
    }

    /// Overall efficiency η_d·η_m seen by a photon leaving the source.
    pub fn eta(&self) -> f64 {
        self.eta_d * self.eta_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    G2,
    CauchySchwarz,
    BellVisibility,
    Tv,
}

/// Source and medium parameters a criterion was evaluated at.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CriterionInputs {
    pub detectors: Vec<DetectorModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<String>,
    /// Gain α, loss β and length L of a slow-light amplifier/attenuator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gain_loss_length: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    /// g², R, the Bell visibility, or the transfer coefficient T.
    pub value: f64,
    /// The conditional-variance product V of the T–V criterion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub secondary: Option<f64>,
    pub threshold: f64,
    pub passes_quantum: bool,
    pub inputs: CriterionInputs,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl CriterionReport {
    pub(crate) fn new(criterion: Criterion, value: f64, secondary: Option<f64>, inputs: CriterionInputs) -> Self {
        let (threshold, passes_quantum) = match criterion {
            Criterion::G2 => (1.0, value < 1.0),
            Criterion::CauchySchwarz => (1.0, value > 1.0),
            Criterion::BellVisibility => (1.0 / 3.0, value > 1.0 / 3.0),
            Criterion::Tv => (1.0, value > 1.0 && secondary.is_some_and(|v| v < 1.0)),
        };
        Self { criterion, value, secondary, threshold, passes_quantum, inputs, flags: vec![] }
    }
}

/// Which branch of a 2PE single-photon experiment the autocorrelation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conditioning {
    /// The photon was absorbed before the π-pulse (the textbook case).
    #[default]
    Absorbed,
    /// Average over absorption (probability `1−e^{−d}`) and transmission, where the
    /// inverted medium only amplifies vacuum.
    Unconditioned,
}

/// Pair parameter p of a two-mode squeezed state with `n` mean photons per mode.
pub fn pair_parameter(n: f64) -> Result<f64> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean photon number must be >= 0, got {n}")));
    }
    Ok(n / (n + 1.0))
}

/// Mean photon number per mode for pair parameter `p`.
pub fn mean_photon_number(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(p / (1.0 - p))
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("pair parameter p must lie in [0, 1), got {p}")));
    }
    Ok(())
}

/// Ratio of twofold coincidences to the product of singles behind a 50/50
/// splitter, for a single photon retrieved from a memory.
pub fn g2_memory(det: &DetectorModel) -> Result<CriterionReport> {
    det.validate()?;
    let (p, u) = (det.p_dc, 0.5 * det.eta());
    let q = 1.0 - p;
    // 1 − 2q(1−u) + q²(1−2u) = p² + 2pqu and 1 − q(1−u) = p + qu, expanded to
    // avoid cancellation at small efficiency and noise.
    let single = p + q * u;
    if single <= 0.0 {
        return Err(Error::InvalidParameter("no clicks at all: zero efficiency and no dark counts".into()));
    }
    let value = (p * p + 2.0 * p * q * u) / (single * single);
    Ok(CriterionReport::new(
        Criterion::G2,
        value,
        None,
        CriterionInputs { detectors: vec![*det], ..Default::default() },
    ))
}

fn check_gain(gain: f64) -> Result<()> {
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(Error::InvalidParameter(format!("gain must be >= 1, got {gain}")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!("efficiency must lie in [0, 1], got {eta}")));
    }
    Ok(())
}

/// Click probability at the echo time of a 2PE that stored one photon, for an
/// inverted medium of gain `G`: `1 − 1/(1+η(G−1))²`.
pub fn click_probability_2pe(gain: f64, eta: f64) -> Result<f64> {
    check_gain(gain)?;
    check_eta(eta)?;
    Ok(1.0 - 1.0 / (1.0 + eta * (gain - 1.0)).powi(2))
}

/// Autocorrelation of the 2PE echo of a single absorbed photon, `G = e^d`.
pub fn g2_2pe(d: f64, eta_d: f64) -> Result<f64> {
    g2_2pe_with(d, eta_d, Conditioning::Absorbed)
}

pub fn g2_2pe_with(d: f64, eta_d: f64, conditioning: Conditioning) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("optical depth must be > 0, got {d}")));
    }
    check_eta(eta_d)?;
    if eta_d == 0.0 {
        return Err(Error::InvalidParameter("autocorrelation undefined at zero efficiency".into()));
    }
    let nbar = d.exp_m1();
    let absorbed = match conditioning {
        Conditioning::Absorbed => 1.0,
        Conditioning::Unconditioned => -(-d).exp_m1(),
    };
    // ⟨x^{a†a}⟩ of the echo: two thermal modes if absorbed, one otherwise.
    let gen = |x: f64| {
        let t = 1.0 / (1.0 + nbar * (1.0 - x));
        absorbed * t * t + (1.0 - absorbed) * t
    };
    let half = gen(1.0 - 0.5 * eta_d);
    let num = 1.0 - 2.0 * half + gen(1.0 - eta_d);
    Ok(num / (1.0 - half).powi(2))
}

/// Cauchy–Schwarz parameter R measured on a two-mode squeezed vacuum whose
/// mode a passes the memory; each side is split on a 50/50 beam splitter.
pub fn cauchy_schwarz(det_a: &DetectorModel, det_b: &DetectorModel, p: f64) -> Result<CriterionReport> {
    det_a.validate()?;
    det_b.validate()?;
    check_p(p)?;
    let s = 1.0 - p;
    // Per-detector efficiencies behind the 50/50 splitters.
    let (al, be) = (0.5 * det_a.eta(), 0.5 * det_b.eta());
    let (da, db) = (det_a.p_dc, det_b.p_dc);
    let (qa, qb) = (1.0 - da, 1.0 - db);
    // c(x) = 1 − ⟨(1−x)^n⟩ on the thermal marginal. The joint terms below are
    // the inclusion–exclusion sums 1 − G(x) − G(y) + G(x, y) in closed form,
    // which keeps every term positive.
    let c = |x: f64| p * x / (s + p * x);
    let cross_f = p * al * be * (s * (1.0 + p) + p * p * (al + be - al * be))
        / ((s + p * al) * (s + p * be) * (1.0 - p * (1.0 - al) * (1.0 - be)));
    let auto_f = |x: f64| 2.0 * p * p * x * x / ((s + 2.0 * p * x) * (s + p * x));
    let cross = da * db + qa * db * c(al) + qb * da * c(be) + qa * qb * cross_f;
    let auto_a = da * da + 2.0 * qa * da * c(al) + qa * qa * auto_f(al);
    let auto_b = db * db + 2.0 * qb * db * c(be) + qb * qb * auto_f(be);
    let value = cross * cross / (auto_a * auto_b);
    Ok(CriterionReport::new(
        Criterion::CauchySchwarz,
        value,
        None,
        CriterionInputs {
            detectors: vec![*det_a, *det_b],
            p: Some(p),
            n: Some(p / (1.0 - p)),
            ..Default::default()
        },
    ))
}

/// Interference visibility of polarization-entangled pairs with side a stored.
pub fn bell_visibility(det_a: &DetectorModel, det_b: &DetectorModel, p: f64) -> Result<CriterionReport> {
    det_a.validate()?;
    det_b.validate()?;
    check_p(p)?;
    let (ea, eb) = (det_a.eta(), det_b.eta());
    let (qa, qb) = (1.0 - det_a.p_dc, 1.0 - det_b.p_dc);
    let s = 1.0 - p;
    let (ha, hb) = (1.0 - ea, 1.0 - eb);
    // Coincidences: C_min = (1−N_a)(1−N_b) for uncorrelated analyser outputs and
    // C_max = C_min + (J − N_aN_b), with N the no-click and J the joint no-click
    // probability; both differences are written without cancellation.
    let click_a = (p * ea + det_a.p_dc * s) / (1.0 - p * ha);
    let click_b = (p * eb + det_b.p_dc * s) / (1.0 - p * hb);
    let excess = qa * qb * s * p * ea * eb / ((1.0 - p * ha * hb) * (1.0 - p * ha) * (1.0 - p * hb));
    let den = 2.0 * click_a * click_b + excess;
    if den <= 0.0 {
        return Err(Error::InvalidParameter("no coincidences: visibility undefined".into()));
    }
    let value = excess / den;
    Ok(CriterionReport::new(
        Criterion::BellVisibility,
        value,
        None,
        CriterionInputs {
            detectors: vec![*det_a, *det_b],
            p: Some(p),
            n: Some(p / (1.0 - p)),
            ..Default::default()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g2_vanishes_without_noise() {
        for eta in [0.01, 0.3, 1.0] {
            let r = g2_memory(&DetectorModel::new(eta, 0.0, 1.0).unwrap()).unwrap();
            assert!(r.value.abs() < 1e-15);
            assert!(r.passes_quantum);
        }
    }

    #[test]
    fn g2_stays_below_one_with_independent_dark_counts() {
        // 1 − g² = q²u²/(p + qu)² with q = 1 − p_dc, u = η/2: noise never lifts g² to 1.
        for &eta in &[1e-4f64, 0.1, 0.9] {
            for &ratio in &[0.1f64, 3.0, 30.0] {
                let p_dc = (ratio * eta).min(0.999);
                let r = g2_memory(&DetectorModel::new(eta, p_dc, 1.0).unwrap()).unwrap();
                let (q, u) = (1.0 - p_dc, 0.5 * eta);
                let want = 1.0 - (q * u / (p_dc + q * u)).powi(2);
                assert!((r.value - want).abs() < 1e-12 && r.value < 1.0);
            }
        }
    }

    #[test]
    fn g2_unit_efficiency_noise_limit() {
        let eps: f64 = 1e-3;
        let r = g2_memory(&DetectorModel::new(1.0, 1.0 - eps, 1.0).unwrap()).unwrap();
        assert!((r.value - (1.0 - eps * eps / 4.0)).abs() < 1e-6);
    }

    #[test]
    fn g2_2pe_limits() {
        assert!((g2_2pe(1e-3, 1.0).unwrap() - 1.5).abs() < 1e-3);
        assert!((g2_2pe(8.0, 1.0).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn click_probability_limits() {
        assert_eq!(click_probability_2pe(5.0, 0.0).unwrap(), 0.0);
        assert!((click_probability_2pe(2.0, 0.5).unwrap() - (1.0 - 1.0 / 2.25)).abs() < 1e-15);
        assert!(click_probability_2pe(1e6, 0.1).unwrap() > 0.999);
    }

    #[test]
    fn cauchy_schwarz_small_p_limit() {
        let p = 1e-3;
        let r = cauchy_schwarz(&DetectorModel::ideal(), &DetectorModel::ideal(), p).unwrap();
        let want = 0.25 * (1.0 + 1.0 / p).powi(2);
        assert!((r.value / want - 1.0).abs() < 5e-3);
    }

    #[test]
    fn bell_ideal_visibility() {
        let p = 0.01;
        let r = bell_visibility(&DetectorModel::ideal(), &DetectorModel::ideal(), p).unwrap();
        assert!((r.value - (1.0 - p) / (1.0 + p)).abs() < 1e-12);
        assert!(r.passes_quantum);
    }

    #[test]
    fn bell_noise_washout() {
        let noisy = DetectorModel::new(0.5, 1.0 - 1e-9, 1.0).unwrap();
        let r = bell_visibility(&noisy, &DetectorModel::ideal(), 0.1).unwrap();
        assert!(r.value.abs() < 1e-6);
    }

    #[test]
    fn pair_parameter_roundtrip() {
        let p = pair_parameter(0.25).unwrap();
        assert!((p - 0.2).abs() < 1e-15);
        assert!((mean_photon_number(p).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn invalid_detectors_rejected() {
        assert!(DetectorModel::new(1.2, 0.0, 1.0).is_err());
        assert!(DetectorModel::new(0.5, 1.0, 1.0).is_err());
    }
}
