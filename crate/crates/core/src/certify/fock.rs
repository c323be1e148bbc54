//! Truncated multi-mode Fock states and click-detector POVMs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Probability mass that may fall outside a truncation before it is an error.
pub const LEAK_TOLERANCE: f64 = 1e-10;

/// Default photon-number cutoff.
pub const DEFAULT_N_MAX: usize = 40;

/// Pure state over `modes` bosonic modes, stored sparsely by occupation numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    amps: BTreeMap<Vec<u32>, C64>,
}

/// Incoherent mixture of pure Fock states.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMixture {
    pub components: Vec<(f64, FockState)>,
}

/// Noisy non-number-resolving detector: click POVM `1 − (1−p_dc)(1−η)^{a†a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClickDetector {
    pub mode: usize,
    pub eta: f64,
    pub p_dc: f64,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

impl FockState {
    pub fn vacuum(modes: usize) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(vec![0; modes], C64::new(1.0, 0.0));
        Self { modes, amps }
    }

    /// `|n⟩` in `mode`, vacuum elsewhere.
    pub fn number(modes: usize, mode: usize, n: u32) -> Result<Self> {
        if mode >= modes {
            return Err(Error::InvalidParameter(format!("mode {mode} out of range for {modes} modes")));
        }
        let mut occ = vec![0; modes];
        occ[mode] = n;
        let mut amps = BTreeMap::new();
        amps.insert(occ, C64::new(1.0, 0.0));
        Ok(Self { modes, amps })
    }

    /// Build from explicit (occupation, amplitude) pairs; duplicates add.
    pub fn from_amplitudes(modes: usize, entries: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        let mut amps = BTreeMap::new();
        for (occ, a) in entries {
            if occ.len() != modes {
                return Err(Error::InvalidParameter("occupation vector has wrong length".into()));
            }
            *amps.entry(occ).or_insert(C64::new(0.0, 0.0)) += a;
        }
        Ok(Self { modes, amps })
    }

    /// Two-mode squeezed vacuum `(1−p)^{1/2} e^{√p a†b†}|00⟩`, truncated at `n_max` pairs.
    pub fn two_mode_squeezed(p: f64, n_max: usize) -> Result<Self> {
        check_p(p)?;
        let leak = p.powi(n_max as i32 + 1);
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
        let entries = (0..=n_max as u32).map(|n| (vec![n, n], C64::new(((1.0 - p) * p.powi(n as i32)).sqrt(), 0.0)));
        Self::from_amplitudes(2, entries)
    }

    /// Polarization-entangled pairs `(1−p) e^{√p(a_h†b_v† − a_v†b_h†)}|0⟩` over
    /// modes `[a_h, a_v, b_h, b_v]`, truncated at `n_max` photons per mode.
    pub fn polarization_pairs(p: f64, n_max: usize) -> Result<Self> {
        check_p(p)?;
        // Mass with k or m above n_max.
        let tail = p.powi(n_max as i32 + 1);
        let leak = 2.0 * tail - tail * tail;
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
        let mut entries = Vec::new();
        for k in 0..=n_max as u32 {
            for m in 0..=n_max as u32 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let a = sign * (1.0 - p) * p.powf(0.5 * (k + m) as f64);
                entries.push((vec![k, m, m, k], C64::new(a, 0.0)));
            }
        }
        Self::from_amplitudes(4, entries)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, occ: &[u32]) -> C64 {
        self.amps.get(occ).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Append `extra` vacuum modes.
    pub fn with_vacuum_modes(&self, extra: usize) -> Self {
        let amps = self
            .amps
            .iter()
            .map(|(occ, a)| {
                let mut o = occ.clone();
                o.extend(std::iter::repeat_n(0, extra));
                (o, *a)
            })
            .collect();
        Self { modes: self.modes + extra, amps }
    }

    /// Lossless beam splitter `a† → √t a† + √(1−t) b†`, `b† → −√(1−t) a† + √t b†`
    /// between modes `a` and `b`; `t` is the intensity transmission.
    pub fn beam_splitter(&self, a: usize, b: usize, t: f64) -> Result<Self> {
        if a >= self.modes || b >= self.modes || a == b {
            return Err(Error::InvalidParameter("beam splitter modes must be distinct and in range".into()));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("transmission must lie in [0, 1], got {t}")));
        }
        let top = self.amps.keys().map(|o| (o[a] + o[b]) as usize).max().unwrap_or(0);
        let lf = ln_factorials(top);
        let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
        let mut out: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (occ, amp) in &self.amps {
            let (n, m) = (occ[a] as usize, occ[b] as usize);
            for k in 0..=n {
                for l in 0..=m {
                    // (√t a†)^k (√r b†)^{n−k} (−√r a†)^l (√t b†)^{m−l}
                    let pa = k + l;
                    let pb = n - k + m - l;
                    let pow_t = k + m - l;
                    let pow_r = n - k + l;
                    let ln_binom = lf[n] - lf[k] - lf[n - k] + lf[m] - lf[l] - lf[m - l];
                    let mag = (ln_binom + 0.5 * (lf[pa] + lf[pb] - lf[n] - lf[m])).exp()
                        * st.powi(pow_t as i32)
                        * sr.powi(pow_r as i32);
                    if mag == 0.0 {
                        continue;
                    }
                    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                    let mut o = occ.clone();
                    o[a] = pa as u32;
                    o[b] = pb as u32;
                    *out.entry(o).or_insert(C64::new(0.0, 0.0)) += amp * (sign * mag);
                }
            }
        }
        out.retain(|_, v| v.norm_sqr() > 0.0);
        Ok(Self { modes: self.modes, amps: out })
    }

    /// Photon-number distribution of one mode.
    pub fn photon_distribution(&self, mode: usize) -> Result<Vec<f64>> {
        if mode >= self.modes {
            return Err(Error::InvalidParameter(format!("mode {mode} out of range")));
        }
        let top = self.amps.keys().map(|o| o[mode] as usize).max().unwrap_or(0);
        let mut p = vec![0.0; top + 1];
        for (occ, a) in &self.amps {
            p[occ[mode] as usize] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Expectation of an operator diagonal in the Fock basis.
    pub fn expect_diagonal(&self, f: impl Fn(&[u32]) -> f64) -> f64 {
        self.amps.iter().map(|(occ, a)| a.norm_sqr() * f(occ)).sum()
    }

    fn max_occupation(&self) -> usize {
        self.amps.keys().flat_map(|o| o.iter().copied()).max().unwrap_or(0) as usize
    }
}

impl FockMixture {
    pub fn pure(state: FockState) -> Self {
        Self { components: vec![(1.0, state)] }
    }

    /// Single-mode state diagonal in the Fock basis with the given photon-number probabilities.
    pub fn diagonal(probabilities: &[f64]) -> Self {
        let components = probabilities
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(n, &w)| (w, FockState::number(1, 0, n as u32).expect("mode 0 of 1")))
            .collect();
        Self { components }
    }

    /// Single-mode thermal state of mean photon number `mean`, truncated at `n_max`.
    pub fn thermal(mean: f64, n_max: usize) -> Result<Self> {
        if !(mean >= 0.0 && mean.is_finite()) {
            return Err(Error::InvalidParameter(format!("mean photon number must be >= 0, got {mean}")));
        }
        let q = mean / (1.0 + mean);
        let leak = q.powi(n_max as i32 + 1);
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
        let p: Vec<f64> = (0..=n_max).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
        Ok(Self::diagonal(&p))
    }

    pub fn map(&self, f: impl Fn(&FockState) -> Result<FockState>) -> Result<Self> {
        let components = self.components.iter().map(|(w, s)| Ok((*w, f(s)?))).collect::<Result<_>>()?;
        Ok(Self { components })
    }

    pub fn weight(&self) -> f64 {
        self.components.iter().map(|(w, s)| w * s.norm_sqr()).sum()
    }

    pub fn expect_diagonal(&self, f: impl Fn(&[u32]) -> f64) -> f64 {
        self.components.iter().map(|(w, s)| w * s.expect_diagonal(&f)).sum()
    }

    fn check(&self, mode: usize) -> Result<()> {
        let n_max = self.components.iter().map(|(_, s)| s.max_occupation()).max().unwrap_or(0);
        let leak = (1.0 - self.weight()).abs();
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
        if self.components.iter().any(|(_, s)| mode >= s.modes) {
            return Err(Error::InvalidParameter(format!("mode {mode} out of range")));
        }
        Ok(())
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("pair parameter p must lie in [0, 1), got {p}")));
    }
    Ok(())
}

impl ClickDetector {
    pub fn new(mode: usize, eta: f64, p_dc: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) || !(0.0..1.0).contains(&p_dc) {
            return Err(Error::InvalidParameter(format!("detector needs η ∈ [0,1], p_dc ∈ [0,1); got {eta}, {p_dc}")));
        }
        Ok(Self { mode, eta, p_dc })
    }

    /// Probability of no click given `n` photons in the mode.
    pub fn no_click(&self, n: u32) -> f64 {
        (1.0 - self.p_dc) * (1.0 - self.eta).powi(n as i32)
    }
}

/// Click probability of a noisy detector on `mode`: the expectation of
/// `1 − (1−p_dc)(1−η)^{a†a}`.
pub fn povm_click(state: &FockMixture, mode: usize, eta: f64, p_dc: f64) -> Result<f64> {
    state.check(mode)?;
    let det = ClickDetector::new(mode, eta, p_dc)?;
    Ok(state.expect_diagonal(|occ| 1.0 - det.no_click(occ[mode])))
}

/// Probability that every listed detector clicks.
pub fn povm_joint_click(state: &FockMixture, detectors: &[ClickDetector]) -> Result<f64> {
    for d in detectors {
        state.check(d.mode)?;
        ClickDetector::new(d.mode, d.eta, d.p_dc)?;
    }
    Ok(state.expect_diagonal(|occ| detectors.iter().map(|d| 1.0 - d.no_click(occ[d.mode])).product()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_clicks_with_dark_probability() {
        let v = FockMixture::pure(FockState::vacuum(1));
        assert!((povm_click(&v, 0, 0.7, 0.03).unwrap() - 0.03).abs() < 1e-15);
    }

    #[test]
    fn single_photon_clicks_with_efficiency() {
        let s = FockMixture::pure(FockState::number(1, 0, 1).unwrap());
        assert!((povm_click(&s, 0, 0.37, 0.0).unwrap() - 0.37).abs() < 1e-15);
    }

    #[test]
    fn thermal_ideal_click_is_geometric() {
        let n = 0.8;
        let s = FockMixture::thermal(n, 200).unwrap();
        assert!((povm_click(&s, 0, 1.0, 0.0).unwrap() - n / (n + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn beam_splitter_is_unitary_and_binomial() {
        let s = FockState::number(2, 0, 5).unwrap().beam_splitter(0, 1, 0.3).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-13);
        let p = s.photon_distribution(0).unwrap();
        // k of 5 photons transmitted with probability 0.3 each.
        let binom = [1.0, 5.0, 10.0, 10.0, 5.0, 1.0];
        for (k, pk) in p.iter().enumerate() {
            let want = binom[k] * 0.3f64.powi(k as i32) * 0.7f64.powi(5 - k as i32);
            assert!((pk - want).abs() < 1e-13, "k={k}: {pk} vs {want}");
        }
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let s = FockState::from_amplitudes(2, [(vec![1, 1], C64::new(1.0, 0.0))]).unwrap();
        let out = s.beam_splitter(0, 1, 0.5).unwrap();
        assert!(out.amplitude(&[1, 1]).norm() < 1e-14);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn squeezed_states_are_normalized() {
        assert!((FockState::two_mode_squeezed(0.2, 30).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        assert!((FockState::polarization_pairs(0.2, 30).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        assert!(matches!(FockState::two_mode_squeezed(0.9, 10), Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn unnormalized_mixture_is_rejected() {
        let m = FockMixture { components: vec![(0.5, FockState::vacuum(1))] };
        assert!(matches!(povm_click(&m, 0, 0.5, 0.0), Err(Error::TruncationOverflow { .. })));
    }
}
