use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{ComplexEnvelope, TimeGrid};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    Gaussian,
    SechChirped,
    Square,
}

/// Analytic pulse envelope.
///
/// * Gaussian: `A·exp(−(t−c)²/2σ²)` with `A = θ/(σ√2π)`.
/// * Square: constant `θ/w` over `[c − w/2, c + w/2]`, `w = width`.
/// * Sech: `Ω₀ sech(β(t−c))·exp(iμ ln cosh(β(t−c)))` with `β = 1/width`,
///   `Ω₀ = θβ/π` and `μ = chirp`; the instantaneous frequency is `μβ tanh(β(t−c))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseShape {
    pub kind: PulseKind,
    pub center: f64,
    pub width: f64,
    pub area: f64,
    #[serde(default)]
    pub chirp: f64,
}

const TAIL_THRESHOLD: f64 = 1e-8;

impl PulseShape {
    pub fn gaussian(center: f64, width: f64, area: f64) -> Self {
        Self { kind: PulseKind::Gaussian, center, width, area, chirp: 0.0 }
    }

    pub fn square(center: f64, width: f64, area: f64) -> Self {
        Self { kind: PulseKind::Square, center, width, area, chirp: 0.0 }
    }

    pub fn sech(center: f64, width: f64, area: f64, chirp: f64) -> Self {
        Self { kind: PulseKind::SechChirped, center, width, area, chirp }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse width must be positive, got {}", self.width)));
        }
        if !self.center.is_finite() || !self.area.is_finite() || !self.chirp.is_finite() {
            return Err(Error::InvalidParameter("pulse parameters must be finite".into()));
        }
        if self.kind != PulseKind::SechChirped && self.chirp != 0.0 {
            return Err(Error::InvalidParameter("chirp is only defined for sech pulses".into()));
        }
        Ok(())
    }

    /// Peak Rabi frequency.
    pub fn peak(&self) -> f64 {
        match self.kind {
            PulseKind::Gaussian => self.area / (self.width * (2.0 * PI).sqrt()),
            PulseKind::Square => self.area / self.width,
            PulseKind::SechChirped => self.area / (PI * self.width),
        }
    }

    /// Half-width of the interval outside which `|Ω| < 1e-8·peak`.
    pub fn support_half_width(&self) -> f64 {
        match self.kind {
            PulseKind::Gaussian => self.width * (2.0 * (1.0 / TAIL_THRESHOLD).ln()).sqrt(),
            PulseKind::Square => 0.5 * self.width,
            PulseKind::SechChirped => self.width * (2.0 / TAIL_THRESHOLD).ln(),
        }
    }

    /// Analytic value at time `t`.
    pub fn value_at(&self, t: f64) -> C64 {
        let x = t - self.center;
        match self.kind {
            PulseKind::Gaussian => {
                C64::new(self.peak() * (-0.5 * (x / self.width).powi(2)).exp(), 0.0)
            }
            PulseKind::Square => {
                if x.abs() < 0.5 * self.width {
                    C64::new(self.peak(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            PulseKind::SechChirped => {
                let u = x / self.width;
                let lncosh = u.abs() + (-2.0 * u.abs()).exp().ln_1p() - std::f64::consts::LN_2;
                let amp = self.peak() / u.cosh();
                C64::from_polar(amp, self.chirp * lncosh)
            }
        }
    }

    /// Instantaneous angular frequency `dφ/dt` of the analytic envelope.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        match self.kind {
            PulseKind::SechChirped => self.chirp / self.width * ((t - self.center) / self.width).tanh(),
            _ => 0.0,
        }
    }

    /// Sample the pulse on `grid`.
    ///
    /// Square edges are weighted by the covered fraction of each sample cell so
    /// that the rendered area is exact for any alignment.
    pub fn render(&self, grid: &TimeGrid) -> Result<ComplexEnvelope> {
        self.validate()?;
        let peak = self.peak().abs();
        if peak > 0.0 {
            let edge = match self.kind {
                PulseKind::Square => {
                    let lo = self.center - 0.5 * self.width;
                    let hi = self.center + 0.5 * self.width;
                    if lo < grid.t0 - 0.5 * grid.dt || hi > grid.t_end() + 0.5 * grid.dt {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => self.value_at(grid.t0).norm().max(self.value_at(grid.t_end()).norm()) / peak,
            };
            if edge > TAIL_THRESHOLD {
                return Err(Error::GridTooShort { edge });
            }
        }
        match self.kind {
            PulseKind::Square => {
                let lo = self.center - 0.5 * self.width;
                let hi = self.center + 0.5 * self.width;
                let amp = self.peak();
                Ok(ComplexEnvelope::from_fn(*grid, |t| {
                    let a = (t - 0.5 * grid.dt).max(lo);
                    let b = (t + 0.5 * grid.dt).min(hi);
                    let frac = ((b - a) / grid.dt).max(0.0);
                    C64::new(amp * frac, 0.0)
                }))
            }
            _ => Ok(ComplexEnvelope::from_fn(*grid, |t| self.value_at(t))),
        }
    }
}
