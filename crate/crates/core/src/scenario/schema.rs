use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::certify::{Conditioning, DetectorModel, TvProtocol};
use crate::echo::{CribDirection, EchoProtocol, EchoSettings, RosePulses};
use crate::numcore::{PulseShape, TransferFunction, ZScheme};
use crate::slowlight::{SlowLightNumerics, SlowLightProtocol, SlowLightScenario};
use crate::twolevel::PropagationConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// A scenario file. Exactly the section matching `kind` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub kind: ScenarioKind,
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// The figure or table the scenario reproduces.
    #[serde(default)]
    pub figure: String,
    /// Output directory, relative to the working directory; `--out` overrides it.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub echo: Option<EchoSection>,
    /// One or more slow-light runs (`[[slowlight]]`).
    #[serde(default)]
    pub slowlight: Vec<SlowLightSection>,
    #[serde(default)]
    pub certify: Option<CertifySection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Echo,
    Slowlight,
    Certify,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EchoKind {
    #[serde(rename = "2pe")]
    TwoPulse,
    Crib,
    Rose,
}

/// Grid layout of an echo run; everything left unset is derived from the pulses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoNumerics {
    #[serde(default = "default_nz")]
    pub nz: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub half_span: Option<f64>,
    #[serde(default)]
    pub nclasses: Option<usize>,
    #[serde(default = "default_recurrence")]
    pub recurrence_factor: f64,
    #[serde(default = "default_samples")]
    pub samples_per_width: f64,
    #[serde(default)]
    pub scheme: ZScheme,
    /// Re-run with doubled slices and fail on a ≥ 1% change.
    #[serde(default)]
    pub convergence_gate: bool,
}

fn default_nz() -> usize {
    40
}
fn default_recurrence() -> f64 {
    2.0
}
fn default_samples() -> f64 {
    10.0
}

impl Default for EchoNumerics {
    fn default() -> Self {
        Self {
            nz: default_nz(),
            dt: None,
            half_span: None,
            nclasses: None,
            recurrence_factor: default_recurrence(),
            samples_per_width: default_samples(),
            scheme: ZScheme::default(),
            convergence_gate: false,
        }
    }
}

impl EchoNumerics {
    pub fn settings(&self, d: f64, grid_scale: f64) -> EchoSettings {
        let propagation = PropagationConfig {
            scheme: self.scheme,
            convergence_gate: self.convergence_gate,
            ..PropagationConfig::new(d, self.nz)
        };
        EchoSettings {
            propagation,
            dt: self.dt,
            half_span: self.half_span,
            nclasses: self.nclasses,
            recurrence_factor: self.recurrence_factor,
            samples_per_width: self.samples_per_width,
        }
        .scaled(grid_scale)
    }
}

fn default_signal() -> PulseShape {
    PulseShape::gaussian(0.0, 1.0, 0.01)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSection {
    pub protocol: EchoKind,
    pub d: f64,
    /// Delay of the π-pulse (2PE) or of the detuning flip (CRIB) after the signal centre.
    #[serde(default)]
    pub tau: Option<f64>,
    /// CRIB read-out direction.
    #[serde(default)]
    pub direction: Option<CribDirection>,
    #[serde(default = "default_signal")]
    pub signal: PulseShape,
    /// 2PE rephasing pulse; its centre is set from `tau`.
    #[serde(default)]
    pub pi_pulse: Option<PulseShape>,
    #[serde(default)]
    pub rose: Option<RosePulses>,
    #[serde(default)]
    pub numerics: EchoNumerics,
}

impl EchoSection {
    pub fn analytic_protocol(&self) -> EchoProtocol {
        match (self.protocol, self.direction.unwrap_or(CribDirection::Forward)) {
            (EchoKind::TwoPulse, _) => EchoProtocol::TwoPulse,
            (EchoKind::Crib, CribDirection::Forward) => EchoProtocol::CribFwd,
            (EchoKind::Crib, CribDirection::Backward) => EchoProtocol::CribBwd,
            (EchoKind::Rose, _) => EchoProtocol::RoseFwd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlowLightMethod {
    /// Full Λ-system simulation with storage and retrieval.
    #[default]
    Simulate,
    /// Frequency-domain propagation only: group delay and shaded-area reading.
    Transfer,
}

/// One slow-light run. `simulate` starts from `preset` and applies the
/// overrides; `transfer` uses either `transfer` + `signal` + `cut` or the
/// preset's medium, signal and storage time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlowLightSection {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub method: SlowLightMethod,
    #[serde(default)]
    pub preset: Option<SlowLightProtocol>,
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub signal: Option<PulseShape>,
    #[serde(default)]
    pub storage: Option<f64>,
    #[serde(default)]
    pub retrieval: Option<f64>,
    #[serde(default)]
    pub pi_width: Option<f64>,
    #[serde(default)]
    pub rabi: Option<f64>,
    #[serde(default)]
    pub detuning: Option<f64>,
    #[serde(default)]
    pub two_photon: Option<f64>,
    #[serde(default)]
    pub numerics: Option<SlowLightNumerics>,
    #[serde(default)]
    pub transfer: Option<TransferFunction>,
    #[serde(default)]
    pub cut: Option<f64>,
    /// Samples per signal width of the transfer grid.
    #[serde(default = "default_transfer_samples")]
    pub samples_per_width: f64,
}

fn default_transfer_samples() -> f64 {
    20.0
}

impl SlowLightSection {
    pub fn preset_scenario(&self) -> Option<SlowLightScenario> {
        let mut s = match self.preset? {
            SlowLightProtocol::Shome => SlowLightScenario::shome(),
            SlowLightProtocol::Fid => SlowLightScenario::fid(),
            SlowLightProtocol::Eit => SlowLightScenario::eit(),
            SlowLightProtocol::Raman => SlowLightScenario::raman(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { s.$f = v; } )* };
        }
        over!(d, gamma, signal, storage, retrieval, rabi, detuning, two_photon, numerics);
        if self.pi_width.is_some() {
            s.pi_width = self.pi_width;
        }
        Some(s)
    }

    /// `(transfer, signal, cut)` of a transfer-method run.
    pub fn transfer_setup(&self) -> Option<(TransferFunction, PulseShape, f64)> {
        let preset = self.preset_scenario();
        let tf = self.transfer.or(preset.map(|s| s.transfer()))?;
        let signal = self.signal.or(preset.map(|s| s.signal))?;
        let cut = self.cut.or(preset.map(|s| s.storage))?;
        Some((tf, signal, cut))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CertifySection {
    /// Exact atomic chain against its large-N limits for every (N, d).
    Chain {
        atoms: Vec<usize>,
        depths: Vec<f64>,
        #[serde(default = "default_n_max")]
        n_max: usize,
        /// Also run the inverted chain (amplifier photon number).
        #[serde(default = "default_true")]
        inverted: bool,
    },
    /// T–V points, optionally scanned over optical depth for CRIB and 2PE.
    Tv {
        #[serde(default)]
        protocols: Vec<TvProtocol>,
        #[serde(default)]
        scan: Option<DepthScan>,
    },
    Counting { checks: Vec<CountingCheck> },
}

fn default_n_max() -> usize {
    crate::certify::fock::DEFAULT_N_MAX
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthScan {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl DepthScan {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CountingCheck {
    G2Memory {
        detector: DetectorModel,
    },
    #[serde(rename = "g2-2pe")]
    G2TwoPulse {
        d: f64,
        eta_d: f64,
        #[serde(default)]
        conditioning: Conditioning,
    },
    CauchySchwarz {
        a: DetectorModel,
        b: DetectorModel,
        p: f64,
    },
    BellVisibility {
        a: DetectorModel,
        b: DetectorModel,
        p: f64,
    },
}

/// Efficiency against optical depth: closed-form curves and optional
/// simulated points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub depths: Vec<f64>,
    #[serde(default)]
    pub scan: Option<DepthScan>,
    #[serde(default)]
    pub analytic: Vec<EchoProtocol>,
    #[serde(default)]
    pub numeric: Option<NumericSweep>,
}

impl SweepSection {
    pub fn depth_values(&self) -> Vec<f64> {
        let mut v = self.depths.clone();
        if let Some(s) = self.scan {
            v.extend(s.values());
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericSweep {
    pub protocol: EchoProtocol,
    /// Signal-to-π-pulse duration ratios (2PE only).
    #[serde(default)]
    pub ratios: Vec<f64>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_signal")]
    pub signal: PulseShape,
    #[serde(default)]
    pub numerics: EchoNumerics,
}

fn default_tau() -> f64 {
    10.0
}

impl NumericSweep {
    pub fn pi_pulse(&self, ratio: f64) -> PulseShape {
        PulseShape::gaussian(0.0, self.signal.width / ratio, PI)
    }
}
