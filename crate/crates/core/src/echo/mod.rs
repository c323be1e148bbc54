//! Photon-echo protocols: sequencing, closed-form efficiencies, full
//! simulations of two-pulse echo, CRIB and ROSE, phase matching and the
//! pulse-area theorem.

mod analytic;
mod phase;
mod runners;
mod sequence;

pub use analytic::{analytic_efficiency, area_theorem_reference, EchoProtocol};
pub use phase::{phase_match, Emission, PhaseMatchProtocol, WaveVectorSet};
pub use runners::{
    run_2pe, run_crib, run_crib_envelope, run_rose, CribDirection, EchoSettings, EfficiencyReport, RosePulses, Traces,
};
pub use sequence::{Event, ProtocolSequence};
