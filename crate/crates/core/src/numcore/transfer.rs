use serde::{Deserialize, Serialize};

use super::{bessel_j1, forward_transform, inverse_transform, ComplexEnvelope};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransferKind {
    InvertedLorentzian,
    Lorentzian,
    Eit,
    Raman,
}

/// Linear propagation through a medium of optical depth `d`: the output
/// spectrum is `Ẽ(ω)·exp(α̃(ω))` with `α̃` the integrated propagation constant.
///
/// `gamma0` is used by the Lorentzian kinds; `gamma`, `rabi` (Ω), `detuning` (Δ)
/// and `two_photon` (δ) by the Λ-system kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferFunction {
    pub kind: TransferKind,
    pub d: f64,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub rabi: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub two_photon: f64,
}

impl TransferFunction {
    pub fn inverted_lorentzian(d: f64, gamma0: f64) -> Self {
        Self { kind: TransferKind::InvertedLorentzian, d, gamma0, gamma: 0.0, rabi: 0.0, detuning: 0.0, two_photon: 0.0 }
    }

    pub fn lorentzian(d: f64, gamma0: f64) -> Self {
        Self { kind: TransferKind::Lorentzian, d, gamma0, gamma: 0.0, rabi: 0.0, detuning: 0.0, two_photon: 0.0 }
    }

    pub fn eit(d: f64, gamma: f64, rabi: f64) -> Self {
        Self { kind: TransferKind::Eit, d, gamma0: 0.0, gamma, rabi, detuning: 0.0, two_photon: 0.0 }
    }

    pub fn raman(d: f64, gamma: f64, rabi: f64, detuning: f64, two_photon: f64) -> Self {
        Self { kind: TransferKind::Raman, d, gamma0: 0.0, gamma, rabi, detuning, two_photon }
    }

    pub fn with_depth(&self, d: f64) -> Self {
        Self { d, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidParameter(format!("optical depth must be >= 0, got {}", self.d)));
        }
        match self.kind {
            TransferKind::InvertedLorentzian | TransferKind::Lorentzian => {
                if !(self.gamma0 > 0.0) {
                    return Err(Error::InvalidParameter("gamma0 must be positive".into()));
                }
            }
            TransferKind::Eit | TransferKind::Raman => {
                if !(self.gamma > 0.0) || !(self.rabi >= 0.0) {
                    return Err(Error::InvalidParameter("gamma must be positive and rabi >= 0".into()));
                }
            }
        }
        Ok(())
    }

    /// `α̃(ω)·L`, the log of the amplitude transfer at angular frequency `ω`.
    pub fn exponent(&self, omega: f64) -> C64 {
        let i = C64::i();
        let half_d = 0.5 * self.d;
        match self.kind {
            TransferKind::InvertedLorentzian => {
                -half_d * i * omega / (self.gamma0 + i * omega)
            }
            TransferKind::Lorentzian => -half_d * self.gamma0 / (self.gamma0 + i * omega),
            TransferKind::Eit | TransferKind::Raman => {
                lambda_exponent(self.d, self.gamma, self.rabi, self.detuning, self.two_photon, omega)
            }
        }
    }

    pub fn transmission(&self, omega: f64) -> C64 {
        self.exponent(omega).exp()
    }
}

/// Homogeneous Λ-system propagation constant
/// `−(d/2)Γ/(i(ω−Δ) + Γ − iΩ²/(4(ω−δ)))`, written without the pole at `ω = δ`.
pub(crate) fn lambda_exponent(d: f64, gamma: f64, rabi: f64, delta: f64, two_photon: f64, omega: f64) -> C64 {
    let i = C64::i();
    let w = omega - two_photon;
    let num = -0.5 * d * gamma * w;
    let den = w * (i * (omega - delta) + gamma) - i * 0.25 * rabi * rabi;
    if den == C64::new(0.0, 0.0) {
        return C64::new(0.0, 0.0);
    }
    num / den
}

/// EIT transparency width `Ω²/(4Γ)`.
pub fn eit_width(rabi: f64, gamma: f64) -> f64 {
    rabi * rabi / (4.0 * gamma)
}

/// Raman absorption width `Ω²Γ/(4Δ²)`.
pub fn raman_width(rabi: f64, gamma: f64, detuning: f64) -> f64 {
    rabi * rabi * gamma / (4.0 * detuning * detuning)
}

/// Light shift `Ω²/(4Δ)` of the Raman line.
pub fn light_shift(rabi: f64, detuning: f64) -> f64 {
    rabi * rabi / (4.0 * detuning)
}

const ALIAS_EDGE: f64 = 1e-4;
const NYQUIST_FRACTION: f64 = 1e-6;

/// Propagate `env` through `tf` in the frequency domain.
pub fn apply_transfer(env: &ComplexEnvelope, tf: &TransferFunction) -> Result<ComplexEnvelope> {
    tf.validate()?;
    let mut spec = forward_transform(env);
    let total = spec.energy();
    if total > 0.0 {
        let limit = 0.75 * spec.grid.nyquist();
        let outer: f64 = spec
            .values
            .iter()
            .enumerate()
            .filter(|(k, _)| spec.grid.omega(*k).abs() > limit)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * spec.grid.d_omega()
            / (2.0 * std::f64::consts::PI);
        if outer > NYQUIST_FRACTION * total {
            return Err(Error::AliasRisk { edge: outer / total });
        }
    }
    for (k, v) in spec.values.iter_mut().enumerate() {
        *v *= tf.transmission(spec.grid.omega(k));
    }
    let out = inverse_transform(&spec);
    let edge = out.edge_ratio((out.len() / 64).max(1));
    if edge > ALIAS_EDGE {
        return Err(Error::AliasRisk { edge });
    }
    Ok(out)
}

/// Regular part of the Lorentzian impulse response,
/// `−dΓ₀·e^{−Γ₀t}·J₁(√(2dΓ₀t))/√(2dΓ₀t)` for `t > 0`; the full response adds `δ(t)`.
pub fn lorentzian_impulse_response(d: f64, gamma0: f64, t: f64) -> f64 {
    if t < 0.0 {
        return 0.0;
    }
    let x = (2.0 * d * gamma0 * t).sqrt();
    let ratio = if x < 1e-8 { 0.5 } else { bessel_j1(x) / x };
    -d * gamma0 * (-gamma0 * t).exp() * ratio
}

/// Energy after `cut` in `output` minus energy after `cut` in `input`, with both
/// normalised by the input energy, clamped to `[0, 1]`.
pub fn shaded_area_efficiency(input: &ComplexEnvelope, output: &ComplexEnvelope, cut: f64) -> f64 {
    let norm = input.energy();
    if norm <= 0.0 {
        return 0.0;
    }
    let v = (output.energy_after(cut) - input.energy_after(cut)) / norm;
    v.clamp(0.0, 1.0)
}
