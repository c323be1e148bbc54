//! Stopped-light memories built on the Λ-system solver: the spectral-hole
//! memory and the free-induction-decay memory (storage by brief Raman
//! π-pulses), and the EIT and Raman memories (control switched off and on).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::echo::{EfficiencyReport, Traces};
use crate::numcore::{
    apply_transfer, eit_width, raman_width, shaded_area_efficiency, spectral_extent, ComplexEnvelope, DetuningDistribution, PulseShape,
    TimeGrid, TransferFunction, TransferKind,
};
use crate::threelevel::{propagate_lambda, propagate_lambda_until, ControlSchedule, ControlSegment};
use crate::twolevel::PropagationConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlowLightProtocol {
    /// Lorentzian spectral hole in a flat inhomogeneous line, Raman π-pulse storage.
    Shome,
    /// Homogeneous Lorentzian absorber, Raman π-pulse storage.
    Fid,
    /// Resonant control switched off and on.
    Eit,
    /// Far-detuned control switched off and on.
    Raman,
}

impl SlowLightProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            SlowLightProtocol::Shome => "shome",
            SlowLightProtocol::Fid => "fid",
            SlowLightProtocol::Eit => "eit",
            SlowLightProtocol::Raman => "raman",
        }
    }

    fn uses_pi_pulses(&self) -> bool {
        matches!(self, SlowLightProtocol::Shome | SlowLightProtocol::Fid)
    }
}

/// Grid and ensemble resolution of a slow-light run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlowLightNumerics {
    #[serde(default = "default_nz")]
    pub nz: usize,
    #[serde(default = "default_samples")]
    pub samples_per_width: f64,
    /// Half width of the class span (spectral-hole memory only).
    #[serde(default)]
    pub half_span: Option<f64>,
    #[serde(default)]
    pub nclasses: Option<usize>,
    #[serde(default = "default_recurrence")]
    pub recurrence_factor: f64,
    /// Retrieval window length in signal widths.
    #[serde(default = "default_window")]
    pub window_widths: f64,
    /// Upper bound on `dt` times the fastest atomic rate (Γ, Ω, |Δ|, |δ|).
    #[serde(default = "default_rate_resolution")]
    pub rate_resolution: f64,
}

fn default_nz() -> usize {
    40
}
fn default_samples() -> f64 {
    10.0
}
fn default_recurrence() -> f64 {
    2.0
}
fn default_window() -> f64 {
    8.0
}
fn default_rate_resolution() -> f64 {
    0.5
}

impl Default for SlowLightNumerics {
    fn default() -> Self {
        Self {
            nz: default_nz(),
            samples_per_width: default_samples(),
            half_span: None,
            nclasses: None,
            recurrence_factor: default_recurrence(),
            window_widths: default_window(),
            rate_resolution: default_rate_resolution(),
        }
    }
}

impl SlowLightNumerics {
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            nz: ((self.nz as f64 * scale).round() as usize).max(20),
            samples_per_width: self.samples_per_width * scale,
            nclasses: self.nclasses.map(|m| ((m as f64 * scale).round() as usize).max(3)),
            recurrence_factor: self.recurrence_factor * scale,
            rate_resolution: self.rate_resolution / scale,
            ..*self
        }
    }
}

/// A complete stopped-light experiment.
///
/// `gamma` is the hole width Γ₀ for the spectral-hole memory and the optical
/// linewidth Γ otherwise. `rabi`, `detuning` (Δ) and `two_photon` (δ) describe
/// the control of the EIT and Raman memories; `pi_width` the Raman π-pulses of
/// the other two (default: a tenth of the signal width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlowLightScenario {
    pub protocol: SlowLightProtocol,
    pub d: f64,
    pub gamma: f64,
    pub signal: PulseShape,
    pub storage: f64,
    pub retrieval: f64,
    #[serde(default)]
    pub pi_width: Option<f64>,
    #[serde(default)]
    pub rabi: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub two_photon: f64,
    #[serde(default)]
    pub numerics: SlowLightNumerics,
}

impl SlowLightScenario {
    /// Hole width 1, d = 20, σ = d/(2Γ₀) = 10, π-pulses of width 1 at 5 and 60.
    pub fn shome() -> Self {
        Self {
            protocol: SlowLightProtocol::Shome,
            d: 20.0,
            gamma: 1.0,
            signal: PulseShape::gaussian(0.0, 10.0, 0.01),
            storage: 5.0,
            retrieval: 60.0,
            pi_width: Some(1.0),
            rabi: 0.0,
            detuning: 0.0,
            two_photon: 0.0,
            numerics: SlowLightNumerics::default(),
        }
    }

    /// Γ = 1, d = 20, σ = 1/(dΓ) = 0.05, π-pulses of width 0.005 at 0.05 and 0.8.
    pub fn fid() -> Self {
        Self {
            protocol: SlowLightProtocol::Fid,
            d: 20.0,
            gamma: 1.0,
            signal: PulseShape::gaussian(0.0, 0.05, 0.01),
            storage: 0.05,
            retrieval: 0.8,
            pi_width: Some(0.005),
            ..Self::shome()
        }
    }

    /// Ω = 4, Γ = 4 (Γ_EIT = 1), d = 20, σ = 10, control off at 5 and on at 60.
    pub fn eit() -> Self {
        Self { protocol: SlowLightProtocol::Eit, gamma: 4.0, rabi: 4.0, pi_width: None, ..Self::shome() }
    }

    /// Γ = 10, Δ = 1000, Ω = 200√10 (Γ_R = 1), δ = 100, σ = 0.05, off at 0.05, on at 0.8.
    pub fn raman() -> Self {
        Self {
            protocol: SlowLightProtocol::Raman,
            gamma: 10.0,
            rabi: 200.0 * 10f64.sqrt(),
            detuning: 1000.0,
            two_photon: 100.0,
            pi_width: None,
            ..Self::fid()
        }
    }

    pub fn pi_pulse_width(&self) -> f64 {
        self.pi_width.unwrap_or(self.signal.width / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        if !(self.d >= 0.0 && self.d.is_finite()) || !(self.gamma > 0.0) {
            return Err(Error::InvalidParameter("need d >= 0 and a positive linewidth".into()));
        }
        if self.signal.area.abs() > PI / 10.0 * (1.0 + 1e-12) {
            return Err(Error::PerturbativeViolation { area: self.signal.area.abs(), bound: PI / 10.0 });
        }
        if !(self.storage > self.signal.center) || !(self.retrieval > self.storage) {
            return Err(Error::OrderingViolation(format!(
                "need signal centre < storage < retrieval, got {}, {}, {}",
                self.signal.center, self.storage, self.retrieval
            )));
        }
        match self.protocol {
            SlowLightProtocol::Shome | SlowLightProtocol::Fid => {
                if !(self.pi_pulse_width() > 0.0) {
                    return Err(Error::InvalidParameter("π-pulse width must be positive".into()));
                }
            }
            SlowLightProtocol::Eit | SlowLightProtocol::Raman => {
                if !(self.rabi > 0.0) {
                    return Err(Error::InvalidParameter("control Rabi frequency must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// Regime gates that degrade the model without invalidating the run.
    pub fn regime_warnings(&self) -> Vec<Error> {
        let mut w = vec![];
        if self.protocol == SlowLightProtocol::Raman && self.detuning.abs() < 10.0 * self.gamma {
            w.push(Error::RamanConditionViolated { delta: self.detuning, gamma10: 10.0 * self.gamma });
        }
        w
    }

    fn pi_pulse(&self, t: f64) -> PulseShape {
        PulseShape::gaussian(t, self.pi_pulse_width(), PI)
    }

    /// Control schedule with storage (`stored = true`) or without.
    pub fn schedule(&self, stored: bool) -> ControlSchedule {
        match self.protocol {
            SlowLightProtocol::Shome | SlowLightProtocol::Fid => {
                let segments = if stored {
                    vec![
                        ControlSegment::Pulse { shape: self.pi_pulse(self.storage) },
                        ControlSegment::Pulse { shape: self.pi_pulse(self.retrieval) },
                    ]
                } else {
                    vec![]
                };
                ControlSchedule { segments, ..Default::default() }
            }
            SlowLightProtocol::Eit | SlowLightProtocol::Raman => {
                let base = if stored {
                    ControlSchedule::switched(self.rabi, self.storage, self.retrieval)
                } else {
                    ControlSchedule {
                        segments: vec![ControlSegment::Constant { rabi: self.rabi, start: None, end: None }],
                        ..Default::default()
                    }
                };
                base.with_detunings(self.detuning, self.two_photon)
            }
        }
    }

    /// Frequency-domain model of the no-storage propagation.
    pub fn transfer(&self) -> TransferFunction {
        match self.protocol {
            SlowLightProtocol::Shome => TransferFunction::inverted_lorentzian(self.d, self.gamma),
            SlowLightProtocol::Fid => TransferFunction::lorentzian(self.d, self.gamma),
            SlowLightProtocol::Eit => TransferFunction::eit(self.d, self.gamma, self.rabi),
            SlowLightProtocol::Raman => {
                TransferFunction::raman(self.d, self.gamma, self.rabi, self.detuning, self.two_photon)
            }
        }
    }

    pub fn window(&self) -> [f64; 2] {
        [self.retrieval, self.retrieval + self.numerics.window_widths * self.signal.width]
    }

    fn shortest_width(&self) -> f64 {
        if self.protocol.uses_pi_pulses() {
            self.signal.width.min(self.pi_pulse_width())
        } else {
            self.signal.width
        }
    }

    /// Time grid with the storage and retrieval events on samples.
    pub fn grid(&self) -> Result<TimeGrid> {
        let mut start = self.signal.center - self.signal.support_half_width();
        if self.protocol.uses_pi_pulses() {
            start = start.min(self.storage - self.pi_pulse(self.storage).support_half_width());
        }
        let end = self.window()[1] + 2.0 * self.signal.width;
        let mut dt = self.shortest_width() / self.numerics.samples_per_width;
        if self.protocol == SlowLightProtocol::Shome {
            dt = dt.min(1.0 / self.half_span()?);
        } else {
            let rate = self.gamma.max(self.rabi).max(self.detuning.abs()).max(self.two_photon.abs());
            dt = dt.min(self.numerics.rate_resolution / rate);
        }
        let gap = self.retrieval - self.storage;
        let origin = |dt: f64| self.storage - ((self.storage - start) / dt).ceil() * dt;
        let needed = |dt: f64| ((end - origin(dt)) / dt).ceil() as usize + 1;
        dt = gap / (gap / dt).ceil();
        TimeGrid::new(origin(dt), dt, needed(dt).next_power_of_two().max(8))
    }

    fn half_span(&self) -> Result<f64> {
        if let Some(h) = self.numerics.half_span {
            return Ok(h);
        }
        let width = self.shortest_width();
        let grid = TimeGrid::covering(-12.0 * width, 12.0 * width, width / 10.0)?;
        let probe = PulseShape::gaussian(0.0, width, 1.0).render(&grid)?;
        Ok((1.3 * spectral_extent(&probe, 1e-10)).max(10.0 * self.gamma))
    }

    /// Class comb for this protocol.
    pub fn distribution(&self, duration: f64) -> Result<DetuningDistribution> {
        Ok(match self.protocol {
            SlowLightProtocol::Shome => {
                let half = self.half_span()?;
                let m = self.numerics.nclasses.unwrap_or_else(|| {
                    DetuningDistribution::classes_for_recurrence(half, self.numerics.recurrence_factor * duration)
                });
                DetuningDistribution::lorentzian_hole(self.gamma, half, m)
            }
            _ => DetuningDistribution::delta_resonant(self.gamma),
        })
    }

    fn config(&self) -> PropagationConfig {
        let decay = if self.protocol == SlowLightProtocol::Shome { 0.0 } else { self.gamma };
        PropagationConfig { decay, ..PropagationConfig::new(self.d, self.numerics.nz) }
    }
}

/// Run the storage sequence and the no-storage reference on the scenario's grid.
pub fn run_slowlight(s: &SlowLightScenario) -> Result<EfficiencyReport> {
    s.validate()?;
    let grid = s.grid()?;
    let input = s.signal.render(&grid)?;
    run_slowlight_input(s, &input)
}

/// As [`run_slowlight`] with an arbitrary input envelope (e.g. a rising exponential).
pub fn run_slowlight_input(s: &SlowLightScenario, input: &ComplexEnvelope) -> Result<EfficiencyReport> {
    s.validate()?;
    let grid = input.grid;
    let window = s.window();
    if window[1] > grid.t_end() {
        return Err(Error::GridTooShort { edge: window[1] - grid.t_end() });
    }
    let cfg = s.config();
    let dist = s.distribution(window[1] - grid.t0)?;
    let stored = s.schedule(true);
    let stop = Some(window[1]);
    let full = propagate_lambda_until(input, &cfg, &dist, &stored, stop)?;
    let reference = propagate_lambda_until(input, &cfg, &dist, &s.schedule(false), stop)?;
    let echo = full.output.windowed(window[0], window[1]);
    let echo_energy = echo.energy();
    let input_energy = input.energy();
    let analytic = shaded_area_estimate(s, input);
    let control = ComplexEnvelope::from_fn(grid, |t| stored.rabi_at(t));
    let class_populations =
        full.class_detunings.iter().zip(&full.final_populations).map(|(d, p)| (*d, p[1])).collect();
    Ok(EfficiencyReport {
        protocol: s.protocol.name().to_string(),
        d: s.d,
        numeric: echo_energy / input_energy,
        analytic,
        echo_time: echo.centroid_between(window[0], window[1]),
        predicted_echo_time: s.retrieval,
        pulse_ratio: s.protocol.uses_pi_pulses().then(|| s.signal.width / s.pi_pulse_width()),
        window,
        input_energy,
        echo_energy,
        mean_excited: full.mean_excited(),
        band_excited: full.mean_excited(),
        convergence: full.convergence.clone(),
        echo: Some(echo),
        traces: Some(Traces {
            input: input.clone(),
            output: full.output,
            reference: Some(reference.output),
            control: Some(control),
        }),
        class_populations,
        warnings: s.regime_warnings().iter().map(|e| e.to_string()).collect(),
    })
}

/// Shaded-area reading of the frequency-domain slow-light output: the energy
/// leaving after the storage time. The grid is extended until the retarded
/// tail has died out.
fn shaded_area_estimate(s: &SlowLightScenario, input: &ComplexEnvelope) -> f64 {
    let tf = s.transfer();
    let mut grid = input.grid;
    for _ in 0..8 {
        let padded = ComplexEnvelope::from_fn(grid, |t| {
            let j = ((t - input.grid.t0) / input.grid.dt).round();
            if j >= 0.0 && (j as usize) < input.len() {
                input.samples[j as usize]
            } else {
                crate::C64::new(0.0, 0.0)
            }
        });
        if let Ok(out) = apply_transfer(&padded, &tf) {
            return shaded_area_efficiency(&padded, &out, s.storage);
        }
        // Pad on both sides so the input head stays clear of the edge test.
        grid.t0 -= 0.5 * grid.n as f64 * grid.dt;
        grid.n *= 2;
    }
    f64::NAN
}

/// Frequency-domain propagation of a signal through one of the archetypal
/// media, read as a group delay and a shaded-area efficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeReport {
    pub transfer: TransferFunction,
    pub cut: f64,
    /// Output peak time minus input peak time.
    pub group_delay: f64,
    /// `d/2Γ₀` in a transparency window, the generalised delay `1/(dΓ₀)` in an
    /// absorption line (`Γ_EIT`, `Γ_R` for the Λ kinds).
    pub predicted_delay: f64,
    pub transmission: f64,
    pub shaded_area: f64,
    #[serde(skip)]
    pub input: Option<ComplexEnvelope>,
    #[serde(skip)]
    pub output: Option<ComplexEnvelope>,
}

pub fn predicted_delay(tf: &TransferFunction) -> f64 {
    match tf.kind {
        TransferKind::InvertedLorentzian => tf.d / (2.0 * tf.gamma0),
        TransferKind::Lorentzian => 1.0 / (tf.d * tf.gamma0),
        TransferKind::Eit => tf.d / (2.0 * eit_width(tf.rabi, tf.gamma)),
        TransferKind::Raman => 1.0 / (tf.d * raman_width(tf.rabi, tf.gamma, tf.detuning)),
    }
}

const ARCHETYPE_DOUBLINGS: usize = 12;

/// Propagate `signal` through `tf` on a grid of `samples_per_width` samples per
/// signal width, extended until the retarded tail fits.
pub fn run_transfer_archetype(
    tf: &TransferFunction,
    signal: &PulseShape,
    cut: f64,
    samples_per_width: f64,
) -> Result<ArchetypeReport> {
    tf.validate()?;
    signal.validate()?;
    if !(samples_per_width >= 1.0) {
        return Err(Error::InvalidParameter(format!("samples_per_width must be >= 1, got {samples_per_width}")));
    }
    let delay = predicted_delay(tf);
    let dt = signal.width / samples_per_width;
    let start = signal.center - signal.support_half_width() - signal.width;
    let end = signal.center.max(cut) + signal.support_half_width() + 4.0 * delay.abs().min(1e3 * signal.width);
    let covering = TimeGrid::covering(start, end, dt)?;
    let mut grid = TimeGrid::new(start, dt, covering.n.next_power_of_two())?;
    let mut last = Error::AliasRisk { edge: f64::NAN };
    for _ in 0..ARCHETYPE_DOUBLINGS {
        let input = signal.render(&grid)?;
        match apply_transfer(&input, tf) {
            Ok(output) => {
                return Ok(ArchetypeReport {
                    transfer: *tf,
                    cut,
                    group_delay: output.peak_time() - input.peak_time(),
                    predicted_delay: delay,
                    transmission: output.energy() / input.energy(),
                    shaded_area: shaded_area_efficiency(&input, &output, cut),
                    input: Some(input),
                    output: Some(output),
                })
            }
            Err(e @ Error::AliasRisk { .. }) => last = e,
            Err(e) => return Err(e),
        }
        // The edge guard scales with n, so pad the head as well.
        grid.t0 -= 0.5 * grid.n as f64 * grid.dt;
        grid.n *= 2;
    }
    Err(last)
}

/// Output of the scenario with storage and retrieval removed.
pub fn reference_slowlight(s: &SlowLightScenario) -> Result<ComplexEnvelope> {
    s.validate()?;
    let grid = s.grid()?;
    let input = s.signal.render(&grid)?;
    let dist = s.distribution(s.window()[1] - grid.t0)?;
    Ok(propagate_lambda(&input, &s.config(), &dist, &s.schedule(false))?.output)
}
