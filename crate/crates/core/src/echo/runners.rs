use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{analytic_efficiency, EchoProtocol, Event, ProtocolSequence};
use crate::numcore::{forward_transform, spectral_extent, ComplexEnvelope, DetuningDistribution, PulseShape, TimeGrid};
use crate::twolevel::{propagate, relative_change, ConvergenceInfo, PropagationConfig, SimulationResult};
use crate::{Error, Result};

/// Numerical layout shared by the echo runners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSettings {
    pub propagation: PropagationConfig,
    /// Time step; defaults to the shortest pulse width over `samples_per_width`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Half width of the flat detuning span; defaults to the spectral extent of the input.
    #[serde(default)]
    pub half_span: Option<f64>,
    /// Class count; defaults to a comb recurrence of `recurrence_factor` protocol durations.
    #[serde(default)]
    pub nclasses: Option<usize>,
    #[serde(default = "default_recurrence")]
    pub recurrence_factor: f64,
    #[serde(default = "default_samples")]
    pub samples_per_width: f64,
}

fn default_recurrence() -> f64 {
    2.0
}

fn default_samples() -> f64 {
    10.0
}

impl EchoSettings {
    pub fn new(d: f64) -> Self {
        Self {
            propagation: PropagationConfig::new(d, 40),
            dt: None,
            half_span: None,
            nclasses: None,
            recurrence_factor: default_recurrence(),
            samples_per_width: default_samples(),
        }
    }

    /// Multiply every grid density (slices, classes, samples) by `scale`.
    pub fn scaled(&self, scale: f64) -> Self {
        let mut s = *self;
        s.propagation.nz = ((self.propagation.nz as f64 * scale).round() as usize).max(20);
        s.samples_per_width = self.samples_per_width * scale;
        s.recurrence_factor = self.recurrence_factor * scale;
        s.dt = self.dt.map(|dt| dt / scale);
        s.nclasses = self.nclasses.map(|m| ((m as f64 * scale).round() as usize).max(3));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CribDirection {
    Forward,
    Backward,
}

/// The two rephasing pulses of a ROSE sequence. With `hard` set the pulses act
/// as instantaneous rotations at their centres instead of propagating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosePulses {
    pub first: PulseShape,
    pub second: PulseShape,
    #[serde(default)]
    pub hard: bool,
}

/// Field traces of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub input: ComplexEnvelope,
    pub output: ComplexEnvelope,
    pub reference: Option<ComplexEnvelope>,
    pub control: Option<ComplexEnvelope>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub protocol: String,
    pub d: f64,
    /// Retrieved energy over input signal energy.
    pub numeric: f64,
    pub analytic: f64,
    pub echo_time: f64,
    pub predicted_echo_time: f64,
    pub pulse_ratio: Option<f64>,
    pub window: [f64; 2],
    pub input_energy: f64,
    pub echo_energy: f64,
    /// Weighted mean of `|x2|²` over all classes at the end of the run.
    pub mean_excited: f64,
    /// The same mean restricted to classes within two inverse signal widths of resonance.
    pub band_excited: f64,
    pub convergence: ConvergenceInfo,
    /// Regime gates that were violated but did not stop the run.
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub echo: Option<ComplexEnvelope>,
    #[serde(skip)]
    pub traces: Option<Traces>,
    /// `(Δ, |x2|²)` per class at the end of the run.
    #[serde(skip)]
    pub class_populations: Vec<(f64, f64)>,
}

const EXTENT_FRACTION: f64 = 1e-10;
const EXTENT_MARGIN: f64 = 1.3;
const WINDOW_WIDTHS: f64 = 4.0;

struct Layout {
    grid: TimeGrid,
    dist: DetuningDistribution,
}

/// Choose grid and class comb. `anchors` are event times that should fall on
/// samples: the first two set the step, the first sets the origin.
fn layout(
    settings: &EchoSettings,
    min_width: f64,
    start: f64,
    end: f64,
    probe: &[PulseShape],
    anchors: [f64; 2],
) -> Result<Layout> {
    let mut dt = settings.dt.unwrap_or(min_width / settings.samples_per_width);
    let half_span = match settings.half_span {
        Some(h) => h,
        None => {
            let grid = TimeGrid::covering(start, end, dt)?;
            let mut field = ComplexEnvelope::zeros(grid);
            for p in probe {
                let mut unit = *p;
                if unit.area == 0.0 {
                    unit.area = 1.0;
                }
                field = field.plus(&unit.render(&grid)?);
            }
            EXTENT_MARGIN * spectral_extent(&field, EXTENT_FRACTION)
        }
    };
    dt = dt.min(1.0 / half_span);
    let origin = |dt: f64| anchors[0] - ((anchors[0] - start) / dt).ceil() * dt;
    let needed = |dt: f64| ((end - origin(dt)) / dt).ceil() as usize + 1;
    let gap = (anchors[1] - anchors[0]).abs();
    let n = if gap > 0.0 {
        // Whole steps between the anchors; refine while the power-of-two sample count allows.
        let mut m = (gap / dt).ceil();
        let n = needed(gap / m).next_power_of_two().max(8);
        while needed(gap / (m + 1.0)) <= n {
            m += 1.0;
        }
        dt = gap / m;
        n
    } else {
        needed(dt).next_power_of_two().max(8)
    };
    let grid = TimeGrid::new(origin(dt), dt, n)?;
    let nclasses = settings
        .nclasses
        .unwrap_or_else(|| DetuningDistribution::classes_for_recurrence(half_span, settings.recurrence_factor * (end - start)));
    Ok(Layout { grid, dist: DetuningDistribution::flat(half_span, nclasses) })
}

struct EchoRun {
    full: SimulationResult,
    reference: Option<SimulationResult>,
    echo: ComplexEnvelope,
    input_energy: f64,
}

fn execute(
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    signal: &ComplexEnvelope,
    events: Vec<Event>,
    window: [f64; 2],
    with_reference: bool,
) -> Result<EchoRun> {
    let cfg = PropagationConfig { convergence_gate: false, ..*cfg };
    let seq = ProtocolSequence { events: events.clone(), window: Some(window) };
    let full = propagate(signal, &cfg, dist, &seq)?;
    let reference = if with_reference {
        let events = events.into_iter().filter(|e| !matches!(e, Event::Signal { .. })).collect();
        let seq = ProtocolSequence { events, window: Some(window) };
        Some(propagate(&ComplexEnvelope::zeros(signal.grid), &cfg, dist, &seq)?)
    } else {
        None
    };
    let diff = match &reference {
        Some(r) => full.output.minus(&r.output),
        None => full.output.clone(),
    };
    Ok(EchoRun { echo: diff.windowed(window[0], window[1]), input_energy: signal.energy(), full, reference })
}

#[allow(clippy::too_many_arguments)]
fn report(
    protocol: &str,
    analytic: f64,
    cfg: &PropagationConfig,
    run: EchoRun,
    predicted: f64,
    window: [f64; 2],
    pulse_ratio: Option<f64>,
    signal: &ComplexEnvelope,
    band: f64,
) -> EfficiencyReport {
    let echo_energy = run.echo.energy();
    let (mut wsum, mut acc) = (0.0, 0.0);
    for ((d, w), p) in run.full.class_detunings.iter().zip(&run.full.class_weights).zip(&run.full.final_populations) {
        if d.abs() <= band {
            wsum += w;
            acc += w * p[1];
        }
    }
    let class_populations =
        run.full.class_detunings.iter().zip(&run.full.final_populations).map(|(d, p)| (*d, p[1])).collect();
    EfficiencyReport {
        protocol: protocol.to_string(),
        d: cfg.d,
        numeric: echo_energy / run.input_energy,
        analytic,
        echo_time: run.echo.centroid_between(window[0], window[1]),
        predicted_echo_time: predicted,
        pulse_ratio,
        window,
        input_energy: run.input_energy,
        echo_energy,
        mean_excited: run.full.mean_excited(),
        band_excited: if wsum > 0.0 { acc / wsum } else { 0.0 },
        convergence: run.full.convergence.clone(),
        traces: Some(Traces {
            input: signal.clone(),
            output: run.full.output.clone(),
            reference: run.reference.map(|r| r.output),
            control: Some(run.full.input.minus(signal)),
        }),
        echo: Some(run.echo),
        class_populations,
        warnings: vec![],
    }
}

/// RMS angular bandwidth of `env`.
fn band_width(env: &ComplexEnvelope) -> f64 {
    let spec = forward_transform(env);
    let (mut m0, mut m2) = (0.0, 0.0);
    for (k, v) in spec.values.iter().enumerate() {
        let w = spec.grid.omega(k);
        m0 += v.norm_sqr();
        m2 += w * w * v.norm_sqr();
    }
    if m0 > 0.0 {
        (2.0 * m2 / m0).sqrt()
    } else {
        0.0
    }
}

/// Run `f` and, when the configuration asks for it, again with doubled `nz`.
fn gated(cfg: &PropagationConfig, f: impl Fn(&PropagationConfig) -> Result<EfficiencyReport>) -> Result<EfficiencyReport> {
    let mut rep = f(cfg)?;
    if cfg.convergence_gate {
        let fine = f(&PropagationConfig { nz: 2 * cfg.nz, ..*cfg })?;
        let change = relative_change(rep.numeric, fine.numeric);
        if change >= 0.01 {
            return Err(Error::ConvergenceNotMet { what: "nz".into(), change });
        }
        rep.convergence.nz_doubling_change = Some(change);
    }
    Ok(rep)
}

const PERTURBATIVE_AREA: f64 = PI / 10.0;

fn check_signal(signal: &PulseShape) -> Result<()> {
    signal.validate()?;
    if signal.area.abs() > PERTURBATIVE_AREA * (1.0 + 1e-12) {
        return Err(Error::PerturbativeViolation { area: signal.area.abs(), bound: PERTURBATIVE_AREA });
    }
    Ok(())
}

/// Two-pulse photon echo: the π-pulse is centred at `signal.center + τ` and the
/// echo is read at `signal.center + 2τ`, after subtracting a π-pulse-only run.
pub fn run_2pe(settings: &EchoSettings, signal: &PulseShape, pi_pulse: &PulseShape, tau: f64) -> Result<EfficiencyReport> {
    check_signal(signal)?;
    pi_pulse.validate()?;
    if (pi_pulse.area - PI).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("rephasing pulse area must be π, got {}", pi_pulse.area)));
    }
    if !(tau > 0.0) {
        return Err(Error::OrderingViolation("delay must be positive".into()));
    }
    let t1 = signal.center;
    let pi = PulseShape { center: t1 + tau, ..*pi_pulse };
    let echo_t = t1 + 2.0 * tau;
    let w = WINDOW_WIDTHS * signal.width;
    let window = [echo_t - w, echo_t + w];
    let start = (t1 - signal.support_half_width()).min(pi.center - pi.support_half_width()) - signal.width;
    let end = window[1] + 2.0 * signal.width;
    let lay = layout(settings, signal.width.min(pi.width), start, end, &[*signal, pi], [t1, pi.center])?;
    let input = signal.render(&lay.grid)?;
    let events = vec![Event::Signal { shape: *signal }, Event::StrongPulse { shape: pi }];
    ProtocolSequence { events: events.clone(), window: Some(window) }.validate()?;
    gated(&settings.propagation, |cfg| {
        let run = execute(cfg, &lay.dist, &input, events.clone(), window, true)?;
        let analytic = analytic_efficiency(EchoProtocol::TwoPulse, cfg.d);
        let band = 2.0 / signal.width;
        Ok(report("2pe", analytic, cfg, run, echo_t, window, Some(signal.width / pi.width), &input, band))
    })
}

/// CRIB: every class detuning is negated at `signal.center + τ`; the echo is read
/// at `signal.center + 2τ`, forward or through the entrance face.
pub fn run_crib(settings: &EchoSettings, signal: &PulseShape, tau: f64, direction: CribDirection) -> Result<EfficiencyReport> {
    check_signal(signal)?;
    let t1 = signal.center;
    let echo_t = t1 + 2.0 * tau;
    let w = WINDOW_WIDTHS * signal.width;
    let window = [echo_t - w, echo_t + w];
    let start = t1 - signal.support_half_width() - signal.width;
    let end = window[1] + 2.0 * signal.width;
    let lay = layout(settings, signal.width, start, end, &[*signal], [t1, t1 + tau])?;
    let input = signal.render(&lay.grid)?;
    let mut rep = crib_on(settings, &input, &lay.dist, t1 + tau, direction, window)?;
    rep.predicted_echo_time = echo_t;
    Ok(rep)
}

/// CRIB on an arbitrary input envelope with flip at `flip_time` and echo window `window`.
pub fn run_crib_envelope(
    settings: &EchoSettings,
    input: &ComplexEnvelope,
    flip_time: f64,
    direction: CribDirection,
    window: [f64; 2],
) -> Result<EfficiencyReport> {
    let half_span = settings.half_span.unwrap_or_else(|| EXTENT_MARGIN * spectral_extent(input, EXTENT_FRACTION));
    let duration = input.grid.t_end() - input.grid.t0;
    let nclasses = settings
        .nclasses
        .unwrap_or_else(|| DetuningDistribution::classes_for_recurrence(half_span, settings.recurrence_factor * duration));
    let dist = DetuningDistribution::flat(half_span, nclasses);
    crib_on(settings, input, &dist, flip_time, direction, window)
}

fn crib_on(
    settings: &EchoSettings,
    input: &ComplexEnvelope,
    dist: &DetuningDistribution,
    flip_time: f64,
    direction: CribDirection,
    window: [f64; 2],
) -> Result<EfficiencyReport> {
    let peak = input.peak_amplitude();
    let jf = input.grid.index_of(flip_time);
    let tail = input.samples[jf..].iter().map(|e| e.norm()).fold(0.0, f64::max) / peak.max(1e-300);
    if tail > 1e-4 {
        return Err(Error::FlipDuringSignal { flip: flip_time, tail });
    }
    if window[0] <= flip_time {
        return Err(Error::OrderingViolation("echo window starts before the flip".into()));
    }
    let mut events = vec![Event::DetuningFlip { time: flip_time }];
    let (name, protocol) = match direction {
        CribDirection::Forward => ("crib-forward", EchoProtocol::CribFwd),
        CribDirection::Backward => {
            events.push(Event::MediumFlip { time: flip_time });
            ("crib-backward", EchoProtocol::CribBwd)
        }
    };
    let predicted = 2.0 * flip_time - input.centroid();
    let band = 2.0 * band_width(input);
    gated(&settings.propagation, |cfg| {
        let run = execute(cfg, dist, input, events.clone(), window, false)?;
        let analytic = analytic_efficiency(protocol, cfg.d);
        Ok(report(name, analytic, cfg, run, predicted, window, None, input, band))
    })
}

/// ROSE: two rephasing pulses at `t₂ < t₃`; the first echo at `2t₂ − t₁` is
/// silenced over ±3 signal widths and the second is read at `t₁ + 2(t₃ − t₂)`.
pub fn run_rose(settings: &EchoSettings, signal: &PulseShape, pulses: &RosePulses) -> Result<EfficiencyReport> {
    check_signal(signal)?;
    pulses.first.validate()?;
    pulses.second.validate()?;
    let t1 = signal.center;
    let (t2, t3) = (pulses.first.center, pulses.second.center);
    if !(t2 > t1) || !(t3 > t2) {
        return Err(Error::OrderingViolation(format!("need t1 < t2 < t3, got {t1}, {t2}, {t3}")));
    }
    let echo_t = t1 + 2.0 * (t3 - t2);
    let w = WINDOW_WIDTHS * signal.width;
    let window = [echo_t - w, echo_t + w];
    if echo_t <= t3 || window[0] <= t3 {
        return Err(Error::OrderingViolation(format!("final echo at {echo_t} does not follow the second pulse at {t3}")));
    }
    let first_echo = 2.0 * t2 - t1;
    let silent = 3.0 * signal.width;
    let pulse_start = if pulses.hard {
        t2
    } else {
        (t2 - pulses.first.support_half_width()).min(t3 - pulses.second.support_half_width())
    };
    let start = (t1 - signal.support_half_width()).min(pulse_start) - signal.width;
    let end = window[1] + 2.0 * signal.width;
    let min_width = if pulses.hard { signal.width } else { signal.width.min(pulses.first.width).min(pulses.second.width) };
    let probe: Vec<PulseShape> = if pulses.hard { vec![*signal] } else { vec![*signal, pulses.first, pulses.second] };
    let lay = layout(settings, min_width, start, end, &probe, [t2, t3])?;
    let input = signal.render(&lay.grid)?;
    let rephase = |p: &PulseShape| {
        if pulses.hard {
            Event::HardPulse { time: p.center, area: p.area, phase: 0.0 }
        } else {
            Event::StrongPulse { shape: *p }
        }
    };
    let events = vec![
        Event::Signal { shape: *signal },
        rephase(&pulses.first),
        Event::SilentWindow { start: first_echo - silent, end: first_echo + silent },
        rephase(&pulses.second),
    ];
    let mut events = events;
    events.sort_by(|a, b| a.time().total_cmp(&b.time()));
    ProtocolSequence { events: events.clone(), window: Some(window) }.validate()?;
    gated(&settings.propagation, |cfg| {
        let run = execute(cfg, &lay.dist, &input, events.clone(), window, !pulses.hard)?;
        let analytic = analytic_efficiency(EchoProtocol::RoseFwd, cfg.d);
        let ratio = signal.width / pulses.first.width;
        Ok(report("rose", analytic, cfg, run, echo_t, window, Some(ratio), &input, 2.0 / signal.width))
    })
}
