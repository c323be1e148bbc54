//! Shared oracles for the integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod povm;

use qmemsim::echo::{run_crib, CribDirection, EchoSettings, EfficiencyReport, ProtocolSequence};
use qmemsim::numcore::*;
use qmemsim::slowlight::{reference_slowlight, SlowLightNumerics, SlowLightProtocol, SlowLightScenario};
use qmemsim::twolevel::{propagate, pulse_area_profile, PropagationConfig};
use qmemsim::C64;

/// `signal` through `tf` in the frequency domain, sampled on `grid`. The FFT
/// grid is padded in front and extended by `tail` so the retarded response
/// cannot wrap around.
pub fn transfer_on(grid: TimeGrid, signal: &PulseShape, tf: &TransferFunction, tail: f64) -> ComplexEnvelope {
    let n = (((grid.t_end() - grid.t0 + tail) / grid.dt).ceil() as usize).max(grid.n);
    let n = (2 * n).next_power_of_two();
    let head = n / 16;
    let padded = TimeGrid::new(grid.t0 - head as f64 * grid.dt, grid.dt, n).unwrap();
    let out = apply_transfer(&signal.render(&padded).unwrap(), tf).unwrap();
    ComplexEnvelope::new(grid, out.samples[head..head + grid.n].to_vec()).unwrap()
}

/// Cheaper class comb for the spectral-hole reference run; the hole and the
/// signal are both resolved.
pub fn shome_reference_numerics() -> SlowLightNumerics {
    SlowLightNumerics { half_span: Some(8.0), samples_per_width: 16.0, recurrence_factor: 1.2, ..Default::default() }
}

/// Relative energy mismatch and relative waveform distance between the
/// time-domain no-storage run and the transfer-function prediction.
pub fn reference_equivalence(s: &SlowLightScenario) -> (f64, f64) {
    let td = reference_slowlight(s).unwrap();
    let fd = transfer_on(td.grid, &s.signal, &s.transfer(), 40.0 / s.gamma);
    ((td.energy() - fd.energy()).abs() / fd.energy(), td.minus(&fd).energy() / fd.energy())
}

pub fn reference_scenario(p: SlowLightProtocol) -> SlowLightScenario {
    match p {
        SlowLightProtocol::Shome => SlowLightScenario { numerics: shome_reference_numerics(), ..SlowLightScenario::shome() },
        SlowLightProtocol::Fid => SlowLightScenario::fid(),
        SlowLightProtocol::Eit => SlowLightScenario::eit(),
        SlowLightProtocol::Raman => SlowLightScenario::raman(),
    }
}

/// Input plus its trapezoidal convolution with the regular part of the
/// Lorentzian impulse response.
pub fn bessel_convolution(input: &ComplexEnvelope, d: f64, gamma0: f64) -> ComplexEnvelope {
    let dt = input.grid.dt;
    let h: Vec<f64> = (0..input.len()).map(|k| lorentzian_impulse_response(d, gamma0, k as f64 * dt)).collect();
    let samples = (0..input.len())
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, hk) in h.iter().enumerate().take(j + 1) {
                let w = if k == 0 || k == j { 0.5 } else { 1.0 };
                acc += input.samples[j - k] * (w * hk);
            }
            input.samples[j] + acc * dt
        })
        .collect();
    ComplexEnvelope::new(input.grid, samples).unwrap()
}

/// Relative L2 distance between the convolution and the transfer function on
/// the retarded tail (after 4σ) of a Lorentzian absorber.
pub fn bessel_tail_mismatch(d: f64, gamma0: f64, sigma: f64) -> f64 {
    let grid = TimeGrid::new(-8.0 * sigma, sigma / 40.0, 4096).unwrap();
    let signal = PulseShape::gaussian(0.0, sigma, 0.01);
    let conv = bessel_convolution(&signal.render(&grid).unwrap(), d, gamma0);
    let tf = transfer_on(grid, &signal, &TransferFunction::lorentzian(d, gamma0), 40.0 / gamma0);
    let cut = 4.0 * sigma;
    let tail = |e: &ComplexEnvelope| e.windowed(cut, grid.t_end());
    tail(&conv).minus(&tail(&tf)).energy() / tail(&tf).energy()
}

pub fn crib_forward(d: f64) -> EfficiencyReport {
    run_crib(&EchoSettings::new(d), &PulseShape::gaussian(0.0, 1.0, 0.01), 10.0, CribDirection::Forward).unwrap()
}

fn flat_medium() -> (TimeGrid, DetuningDistribution) {
    let half = 15.0;
    let grid = TimeGrid::new(-20.0, 0.04, 2048).unwrap();
    let nclasses = DetuningDistribution::classes_for_recurrence(half, 2.0 * (grid.t_end() - grid.t0));
    (grid, DetuningDistribution::flat(half, nclasses))
}

/// Output-to-input area ratio of a weak Gaussian pulse through a broad line.
pub fn small_area_ratio(d: f64) -> f64 {
    let (grid, dist) = flat_medium();
    let input = PulseShape::gaussian(0.0, 1.0, 0.01).render(&grid).unwrap();
    let res = propagate(&input, &PropagationConfig::new(d, 40), &dist, &ProtocolSequence::default()).unwrap();
    res.output.area().norm() / input.area().norm()
}

/// Largest relative deviation from 2π of the pulse area along the medium.
pub fn sech_2pi_area_drift(d: f64) -> f64 {
    let (grid, dist) = flat_medium();
    let two_pi = 2.0 * std::f64::consts::PI;
    let input = PulseShape::sech(0.0, 1.0, two_pi, 0.0).render(&grid).unwrap();
    let res = propagate(&input, &PropagationConfig::new(d, 40), &dist, &ProtocolSequence::default()).unwrap();
    pulse_area_profile(&res).iter().map(|(_, a)| (a - two_pi).abs() / two_pi).fold(0.0, f64::max)
}
