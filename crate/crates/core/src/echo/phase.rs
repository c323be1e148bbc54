use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseMatchProtocol {
    #[serde(rename = "2pe")]
    TwoPulse,
    Rose,
}

/// Unit wave vectors of the signal (`k1`) and the rephasing pulses (`k2`, `k3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveVectorSet {
    pub k1: [f64; 3],
    pub k2: [f64; 3],
    pub k3: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emission {
    Direction([f64; 3]),
    Silent,
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl WaveVectorSet {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3)] {
            if (norm(v) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("{name} is not a unit vector")));
            }
        }
        Ok(())
    }
}

/// Echo wave vector `2k2 − k1` (two-pulse echo) or `k1 + 2(k3 − k2)` (ROSE);
/// emission requires it to be a unit vector.
pub fn phase_match(protocol: PhaseMatchProtocol, kset: &WaveVectorSet) -> Result<Emission> {
    kset.validate()?;
    let (a, b, c) = (kset.k1, kset.k2, kset.k3);
    let k: [f64; 3] = match protocol {
        PhaseMatchProtocol::TwoPulse => std::array::from_fn(|i| 2.0 * b[i] - a[i]),
        PhaseMatchProtocol::Rose => std::array::from_fn(|i| a[i] + 2.0 * (c[i] - b[i])),
    };
    if (norm(k) - 1.0).abs() <= 1e-9 {
        Ok(Emission::Direction(k))
    } else {
        Ok(Emission::Silent)
    }
}
