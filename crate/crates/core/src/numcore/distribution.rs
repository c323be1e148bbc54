use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    /// `g(Δ) = 1` over the span.
    Flat,
    /// `g(Δ) = 1 − 1/(1 + (Δ/Γ₀)²)`, a Lorentzian transparency hole.
    LorentzianHole,
    /// A single homogeneous class at `Δ = 0` whose coupling weight is `Γ₀`.
    DeltaResonant,
}

/// Inhomogeneous detuning distribution discretised on a uniform class grid.
///
/// Classes sit at `Δ_k = Δmin + k·h` with trapezoidal weights. When the span is
/// symmetric and `tail_correction` is set, the classes beyond the span are
/// accounted for by their adiabatic response, which adds a pure delay term to
/// the field equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningDistribution {
    pub kind: DistributionKind,
    pub gamma0: f64,
    pub span: [f64; 2],
    pub nclasses: usize,
    #[serde(default = "default_true")]
    pub tail_correction: bool,
}

fn default_true() -> bool {
    true
}

/// One detuning class: its detuning and its weight `g(Δ)·w/π` in the field source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningClass {
    pub delta: f64,
    pub weight: f64,
}

impl DetuningDistribution {
    pub fn flat(half_span: f64, nclasses: usize) -> Self {
        Self {
            kind: DistributionKind::Flat,
            gamma0: 1.0,
            span: [-half_span, half_span],
            nclasses,
            tail_correction: true,
        }
    }

    pub fn lorentzian_hole(gamma0: f64, half_span: f64, nclasses: usize) -> Self {
        Self {
            kind: DistributionKind::LorentzianHole,
            gamma0,
            span: [-half_span, half_span],
            nclasses,
            tail_correction: true,
        }
    }

    pub fn delta_resonant(gamma0: f64) -> Self {
        Self {
            kind: DistributionKind::DeltaResonant,
            gamma0,
            span: [0.0, 0.0],
            nclasses: 1,
            tail_correction: false,
        }
    }

    /// Class count giving a comb recurrence time `2π/h` of at least `recurrence`.
    pub fn classes_for_recurrence(half_span: f64, recurrence: f64) -> usize {
        let h = 2.0 * PI / recurrence;
        ((2.0 * half_span / h).ceil() as usize + 1).max(3)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma0 must be positive, got {}", self.gamma0)));
        }
        if self.kind == DistributionKind::DeltaResonant {
            return Ok(());
        }
        if !(self.span[1] > self.span[0]) || !self.span.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!("invalid detuning span {:?}", self.span)));
        }
        if self.nclasses < 3 {
            return Err(Error::InvalidParameter("at least 3 detuning classes required".into()));
        }
        Ok(())
    }

    /// Spectral density `g(Δ)`.
    pub fn density(&self, delta: f64) -> f64 {
        match self.kind {
            DistributionKind::Flat => 1.0,
            DistributionKind::LorentzianHole => {
                let x = delta / self.gamma0;
                1.0 - 1.0 / (1.0 + x * x)
            }
            DistributionKind::DeltaResonant => 0.0,
        }
    }

    pub fn spacing(&self) -> f64 {
        if self.kind == DistributionKind::DeltaResonant {
            return 0.0;
        }
        (self.span[1] - self.span[0]) / (self.nclasses - 1) as f64
    }

    /// Comb recurrence time `2π/h` of the discrete class grid.
    pub fn recurrence_time(&self) -> f64 {
        let h = self.spacing();
        if h > 0.0 {
            2.0 * PI / h
        } else {
            f64::INFINITY
        }
    }

    pub fn max_abs_detuning(&self) -> f64 {
        self.span[0].abs().max(self.span[1].abs())
    }

    pub fn classes(&self) -> Vec<DetuningClass> {
        if self.kind == DistributionKind::DeltaResonant {
            return vec![DetuningClass { delta: 0.0, weight: self.gamma0 }];
        }
        let h = self.spacing();
        (0..self.nclasses)
            .map(|k| {
                let delta = self.span[0] + k as f64 * h;
                let end = k == 0 || k + 1 == self.nclasses;
                let w = if end { 0.5 * h } else { h };
                DetuningClass { delta, weight: self.density(delta) * w / PI }
            })
            .collect()
    }

    /// Trapezoidal estimate of `∫g(Δ)dΔ` over the span.
    pub fn quadrature_integral(&self) -> f64 {
        self.classes().iter().map(|c| c.weight).sum::<f64>() * PI
    }

    /// `∫ g(Δ)/Δ² dΔ` over the detunings outside a symmetric span, or 0 when the
    /// correction is disabled or the span is not symmetric.
    pub fn tail_integral(&self) -> f64 {
        if !self.tail_correction || self.kind == DistributionKind::DeltaResonant {
            return 0.0;
        }
        let d = self.span[1];
        if (self.span[0] + d).abs() > 1e-12 * d.abs().max(1.0) {
            return 0.0;
        }
        match self.kind {
            DistributionKind::Flat => 2.0 / d,
            DistributionKind::LorentzianHole => {
                let g = self.gamma0;
                2.0 / g * (0.5 * PI - (d / g).atan())
            }
            DistributionKind::DeltaResonant => 0.0,
        }
    }
}
