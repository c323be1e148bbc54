use serde::{Deserialize, Serialize};

use crate::numcore::PulseShape;
use crate::{Error, Result};

/// One timed event of a storage protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Event {
    /// The weak signal; informational for propagation, used for validation.
    Signal { shape: PulseShape },
    /// A strong pulse added to the input field and propagated with it.
    StrongPulse { shape: PulseShape },
    /// An instantaneous rotation of every class by `area` about the axis at `phase`.
    HardPulse { time: f64, area: f64, phase: f64 },
    /// Negates every class detuning.
    DetuningFlip { time: f64 },
    /// Reverses the slice order and re-emits through the entrance face.
    MediumFlip { time: f64 },
    /// Suppresses the radiated source term over `[start, end]`.
    SilentWindow { start: f64, end: f64 },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Signal { shape } | Event::StrongPulse { shape } => shape.center,
            Event::HardPulse { time, .. } | Event::DetuningFlip { time } | Event::MediumFlip { time } => time,
            Event::SilentWindow { start, .. } => start,
        }
    }

    fn is_flip(&self) -> bool {
        matches!(self, Event::DetuningFlip { .. } | Event::MediumFlip { .. })
    }
}

/// Ordered protocol events and the echo extraction window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSequence {
    pub events: Vec<Event>,
    #[serde(default)]
    pub window: Option<[f64; 2]>,
}

impl ProtocolSequence {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events, window: None }
    }

    pub fn with_window(mut self, start: f64, end: f64) -> Self {
        self.window = Some([start, end]);
        self
    }

    /// Event times must increase strictly; a detuning flip and a medium flip may
    /// share a time. The echo window must not overlap the signal's ±4σ support.
    pub fn validate(&self) -> Result<()> {
        for pair in self.events.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let same_time_flips = a.is_flip() && b.is_flip() && a.time() == b.time() && a != b;
            if !(b.time() > a.time() || same_time_flips) {
                return Err(Error::OrderingViolation(format!(
                    "event at t={} does not follow event at t={}",
                    b.time(),
                    a.time()
                )));
            }
        }
        for ev in &self.events {
            match ev {
                Event::Signal { shape } | Event::StrongPulse { shape } => shape.validate()?,
                Event::SilentWindow { start, end } if end <= start => {
                    return Err(Error::OrderingViolation(format!("silent window [{start}, {end}] is empty")));
                }
                _ => {}
            }
        }
        if let Some([w0, w1]) = self.window {
            if w1 <= w0 {
                return Err(Error::OrderingViolation(format!("echo window [{w0}, {w1}] is empty")));
            }
            for ev in &self.events {
                if let Event::Signal { shape } = ev {
                    let s0 = shape.center - 4.0 * shape.width;
                    let s1 = shape.center + 4.0 * shape.width;
                    if w0 < s1 && s0 < w1 {
                        return Err(Error::OrderingViolation(format!(
                            "echo window [{w0}, {w1}] overlaps the signal [{s0}, {s1}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
