//! Continuous-variable T–V criterion: signal transfer T and conditional variance V.

use serde::{Deserialize, Serialize};

use super::counting::{Criterion, CriterionInputs, CriterionReport};
use crate::{Error, Result};

/// Flag attached to slow-light T–V reports: the noise term is used as printed,
/// which gives V = T = 1 rather than (T, V) = (2, 0) for a lossless memory.
pub const FLAG_V_NOISE_AS_PRINTED: &str = "v-noise-as-printed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TvProtocol {
    /// Backward CRIB (or gradient echo) as two beam splitters.
    Crib { d: f64 },
    /// Two-pulse echo: a beam splitter followed by an amplifier of gain e^d.
    #[serde(rename = "2pe")]
    TwoPulseEcho { d: f64 },
    /// Travelling wave with distributed gain α and loss β over length L.
    #[serde(rename = "slowlight")]
    SlowLight { alpha: f64, beta: f64, length: f64 },
}

/// Phase-insensitive amplifier or attenuator set by the optical depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplifierModel {
    Amplifier { gain: f64 },
    Attenuator { transmission: f64 },
}

impl AmplifierModel {
    /// Inverted medium: `G = e^d`.
    pub fn inverted(d: f64) -> Result<Self> {
        check_depth(d)?;
        Ok(Self::Amplifier { gain: d.exp() })
    }

    /// Ground-state medium: `η = e^{−d}`.
    pub fn absorbing(d: f64) -> Result<Self> {
        check_depth(d)?;
        Ok(Self::Attenuator { transmission: (-d).exp() })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Amplifier { gain } if !(gain >= 1.0 && gain.is_finite()) => {
                Err(Error::InvalidParameter(format!("amplifier gain must be >= 1, got {gain}")))
            }
            Self::Attenuator { transmission } if !(transmission > 0.0 && transmission <= 1.0) => {
                Err(Error::InvalidParameter(format!("transmission must lie in (0, 1], got {transmission}")))
            }
            _ => Ok(()),
        }
    }

    /// Output noise spectrum for input spectrum `s_in` (shot noise = 1).
    pub fn output_spectrum(&self, s_in: f64) -> f64 {
        match *self {
            Self::Amplifier { gain } => gain * s_in + gain - 1.0,
            Self::Attenuator { transmission } => transmission * s_in + 1.0 - transmission,
        }
    }
}

fn check_depth(d: f64) -> Result<()> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("optical depth must be >= 0, got {d}")));
    }
    Ok(())
}

/// Transmission η and noise photon number N_f of a gain/loss medium.
/// Close to α = β the product (1−η)N_f is evaluated by its series, which tends to 2αL.
pub fn slowlight_noise(alpha: f64, beta: f64, length: f64) -> Result<(f64, f64)> {
    if !(alpha >= 0.0 && beta >= 0.0 && length >= 0.0) || !(alpha + beta + length).is_finite() {
        return Err(Error::InvalidParameter("gain, loss and length must be finite and >= 0".into()));
    }
    let x = (alpha - beta) * length;
    let eta = x.exp();
    if alpha == beta {
        return Err(Error::DegenerateGainLoss { limit: 2.0 * alpha * length });
    }
    // (1−η)·2α/(β−α) = 2αL·(e^x − 1)/x
    let ratio = if x.abs() < 1e-5 { 1.0 + x / 2.0 + x * x / 6.0 } else { x.exp_m1() / x };
    Ok((eta, 2.0 * alpha * length * ratio))
}

/// Evaluate T and V for a protocol; `passes_quantum` requires T > 1 and V < 1.
pub fn tv_criterion(protocol: &TvProtocol) -> Result<CriterionReport> {
    let mut inputs = CriterionInputs::default();
    let mut flags = vec![];
    let (t, v) = match *protocol {
        TvProtocol::Crib { d } => {
            check_depth(d)?;
            inputs.d = Some(d);
            inputs.protocol = Some("crib".into());
            let w = -(-d).exp_m1();
            (2.0 * w * w, 1.0 - w * w)
        }
        TvProtocol::TwoPulseEcho { d } => {
            check_depth(d)?;
            inputs.d = Some(d);
            inputs.protocol = Some("2pe".into());
            let s = (0.5 * d).sinh();
            (4.0 * s * s / (2.0 * d.exp() - 1.0), 1.0 - (-d).exp() + d.exp())
        }
        TvProtocol::SlowLight { alpha, beta, length } => {
            inputs.gain_loss_length = Some([alpha, beta, length]);
            inputs.protocol = Some("slowlight".into());
            let (eta, noise) = slowlight_noise(alpha, beta, length)?;
            let v_noise = 1.0 + noise;
            flags.push(FLAG_V_NOISE_AS_PRINTED.to_string());
            (2.0 * eta / (1.0 + v_noise), 1.0 - eta + v_noise)
        }
    };
    let mut r = CriterionReport::new(Criterion::Tv, t, Some(v), inputs);
    r.flags = flags;
    Ok(r)
}
