//! Two-level inhomogeneous ensemble: per-class Schrödinger evolution coupled to
//! Maxwell propagation along the medium.
//!
//! Amplitudes obey `∂tCg = −(i/2)E*·Ce`, `∂tCe = −(i/2)E·Cg + (iΔ − Γ)Ce`, and
//! the field obeys `∂ζE = −i(d/π)∫g(Δ)P dΔ` with `P = Cg*·Ce` and `ζ = z/L`.

use serde::{Deserialize, Serialize};

use crate::echo::{Event, ProtocolSequence};
use crate::numcore::march::{HardRotation, Init, MarchSpec, System};
use crate::numcore::{ComplexEnvelope, DetuningDistribution, SliceDiagnostics, ZScheme};
use crate::{Error, Result, C64};

/// Probability amplitudes of one detuning class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub cg: C64,
    pub ce: C64,
}

impl TwoLevelState {
    pub fn ground() -> Self {
        Self { cg: C64::new(1.0, 0.0), ce: C64::new(0.0, 0.0) }
    }

    pub fn excited() -> Self {
        Self { cg: C64::new(0.0, 0.0), ce: C64::new(1.0, 0.0) }
    }

    /// Optical coherence `P = Cg*·Ce`.
    pub fn coherence(&self) -> C64 {
        self.cg.conj() * self.ce
    }

    pub fn norm_sqr(&self) -> f64 {
        self.cg.norm_sqr() + self.ce.norm_sqr()
    }

    pub(crate) fn to_pair(self) -> [C64; 2] {
        [self.cg, self.ce]
    }

    pub(crate) fn from_pair(x: [C64; 2]) -> Self {
        Self { cg: x[0], ce: x[1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inversion {
    #[default]
    Ground,
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationConfig {
    /// Optical depth `d = αL`.
    pub d: f64,
    pub nz: usize,
    /// Minimum RK4 substeps per sample wherever the coupling is strong.
    #[serde(default = "default_substeps")]
    pub nt_substeps: usize,
    /// Optical decay rate Γ.
    #[serde(default)]
    pub decay: f64,
    #[serde(default)]
    pub inversion: Inversion,
    #[serde(default)]
    pub scheme: ZScheme,
    /// Retain the field at every slice.
    #[serde(default)]
    pub keep_slices: bool,
    /// Re-run with doubled `nz` and fail if the reported figure moves by ≥ 1%.
    #[serde(default)]
    pub convergence_gate: bool,
}

fn default_substeps() -> usize {
    4
}

impl PropagationConfig {
    pub fn new(d: f64, nz: usize) -> Self {
        Self {
            d,
            nz,
            nt_substeps: default_substeps(),
            decay: 0.0,
            inversion: Inversion::Ground,
            scheme: ZScheme::Heun,
            keep_slices: false,
            convergence_gate: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidParameter(format!("optical depth must be >= 0, got {}", self.d)));
        }
        if self.nz < 20 {
            return Err(Error::InvalidParameter(format!("nz must be >= 20, got {}", self.nz)));
        }
        if self.nt_substeps == 0 {
            return Err(Error::InvalidParameter("nt_substeps must be >= 1".into()));
        }
        if !(self.decay >= 0.0 && self.decay.is_finite()) {
            return Err(Error::InvalidParameter("decay must be >= 0".into()));
        }
        Ok(())
    }

    pub(crate) fn initial_pair(&self) -> [C64; 2] {
        match self.inversion {
            Inversion::Ground => TwoLevelState::ground().to_pair(),
            Inversion::Inverted => TwoLevelState::excited().to_pair(),
        }
    }

    pub(crate) fn response_sign(&self) -> f64 {
        match self.inversion {
            Inversion::Ground => 1.0,
            Inversion::Inverted => -1.0,
        }
    }
}

/// Numerical settings actually used for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceInfo {
    pub nz: usize,
    pub nclasses: usize,
    pub scheme: ZScheme,
    pub max_substeps: usize,
    pub gate_doublings: u32,
    pub step_error_estimate: f64,
    /// Relative change of the gated figure when `nz` is doubled, if checked.
    pub nz_doubling_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Total field entering the medium (signal plus co-propagated pulses).
    pub input: ComplexEnvelope,
    /// Field leaving the medium. After a medium flip, samples from the flip
    /// onward hold the field re-emitted through the original entrance face.
    pub output: ComplexEnvelope,
    pub slices: Vec<SliceDiagnostics>,
    /// Slice diagnostics of the re-emission phase after a medium flip.
    pub return_slices: Vec<SliceDiagnostics>,
    pub slice_fields: Option<Vec<ComplexEnvelope>>,
    pub class_detunings: Vec<f64>,
    pub class_weights: Vec<f64>,
    /// `(|x1|², |x2|²)` per class at the end of the run, averaged over slices:
    /// `(|Cg|², |Ce|²)` for two-level atoms, `(|P|², |S|²)` for Λ atoms.
    pub final_populations: Vec<[f64; 2]>,
    pub convergence: ConvergenceInfo,
}

impl SimulationResult {
    pub fn transmission(&self) -> f64 {
        self.output.energy() / self.input.energy()
    }

    /// Mean excited population weighted by the class weights.
    pub fn mean_excited(&self) -> f64 {
        let wsum: f64 = self.class_weights.iter().sum();
        if wsum == 0.0 {
            return 0.0;
        }
        self.final_populations.iter().zip(&self.class_weights).map(|(p, w)| p[1] * w).sum::<f64>() / wsum
    }
}

/// Integrate one class driven by `field` (no propagation), returning the state
/// at every grid sample.
pub fn evolve_class(
    state: TwoLevelState,
    field: &ComplexEnvelope,
    delta: f64,
    gamma: f64,
) -> Result<Vec<TwoLevelState>> {
    if (state.norm_sqr() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter(format!("state norm {} differs from 1", state.norm_sqr())));
    }
    let spec = MarchSpec {
        system: System::TwoLevel,
        grid: field.grid,
        deltas: vec![delta],
        weights: vec![0.0],
        gamma,
        spin_rate: C64::new(0.0, 0.0),
        control: None,
        depth: 0.0,
        nz: 1,
        scheme: ZScheme::Heun,
        substeps: default_substeps(),
        tail_coef: 0.0,
        init: Init::Uniform(state.to_pair()),
        flips: vec![],
        hard: vec![],
        silent: vec![],
        range: (0, field.grid.n - 1),
        keep_fields: false,
        keep_states: false,
    };
    let (traj, _) = spec.class_trajectory(&field.samples, 0)?;
    Ok(traj.into_iter().map(TwoLevelState::from_pair).collect())
}

/// Schedule-derived ingredients shared by the propagation phases.
struct Prepared {
    total: ComplexEnvelope,
    flips: Vec<usize>,
    hard: Vec<HardRotation>,
    silent: Vec<(usize, usize)>,
    medium_flip: Option<usize>,
}

fn prepare(input: &ComplexEnvelope, schedule: &ProtocolSequence) -> Result<Prepared> {
    schedule.validate()?;
    let grid = input.grid;
    let mut total = input.clone();
    let mut flips = vec![];
    let mut hard = vec![];
    let mut silent = vec![];
    let mut medium_flip = None;
    for ev in &schedule.events {
        match ev {
            Event::Signal { .. } => {}
            Event::StrongPulse { shape } => {
                total = total.plus(&shape.render(&grid)?);
            }
            Event::HardPulse { time, area, phase } => {
                hard.push(HardRotation { index: grid.index_of(*time), area: *area, phase: *phase });
            }
            Event::DetuningFlip { time } => flips.push(grid.index_at_or_after(*time).max(1)),
            Event::MediumFlip { time } => {
                if medium_flip.is_some() {
                    return Err(Error::OrderingViolation("only one medium flip is supported".into()));
                }
                medium_flip = Some(grid.index_at_or_after(*time).clamp(1, grid.n - 2));
            }
            Event::SilentWindow { start, end } => {
                silent.push((grid.index_at_or_after(*start), grid.index_of(*end)));
            }
        }
    }
    Ok(Prepared { total, flips, hard, silent, medium_flip })
}

fn first_active(total: &ComplexEnvelope, hard: &[HardRotation]) -> usize {
    let first_field = total.samples.iter().position(|e| e.norm() > 0.0).unwrap_or(total.len() - 1);
    let first_hard = hard.iter().map(|h| h.index).min().unwrap_or(usize::MAX);
    first_field.min(first_hard).saturating_sub(2)
}

/// Propagate `input` through the ensemble, applying `schedule`.
pub fn propagate(
    input: &ComplexEnvelope,
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    schedule: &ProtocolSequence,
) -> Result<SimulationResult> {
    let result = propagate_once(input, cfg, dist, schedule)?;
    if !cfg.convergence_gate {
        return Ok(result);
    }
    let fine_cfg = PropagationConfig { nz: 2 * cfg.nz, convergence_gate: false, keep_slices: false, ..*cfg };
    let fine = propagate_once(input, &fine_cfg, dist, schedule)?;
    let change = relative_change(result.output.energy(), fine.output.energy());
    if change >= 0.01 {
        return Err(Error::ConvergenceNotMet { what: "nz".into(), change });
    }
    let mut result = result;
    result.convergence.nz_doubling_change = Some(change);
    Ok(result)
}

pub(crate) fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn propagate_once(
    input: &ComplexEnvelope,
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    schedule: &ProtocolSequence,
) -> Result<SimulationResult> {
    cfg.validate()?;
    dist.validate()?;
    let prep = prepare(input, schedule)?;
    let grid = input.grid;
    let classes = dist.classes();
    let deltas: Vec<f64> = classes.iter().map(|c| c.delta).collect();
    let weights: Vec<f64> = classes.iter().map(|c| c.weight).collect();
    let tail_coef = cfg.d / (2.0 * std::f64::consts::PI) * dist.tail_integral() * cfg.response_sign();
    let start = first_active(&prep.total, &prep.hard);
    let end_forward = prep.medium_flip.unwrap_or(grid.n - 1);

    let base = |deltas: Vec<f64>, init: Init, range: (usize, usize), flips: Vec<usize>, keep_states: bool| MarchSpec {
        system: System::TwoLevel,
        grid,
        deltas,
        weights: weights.clone(),
        gamma: cfg.decay,
        spin_rate: C64::new(0.0, 0.0),
        control: None,
        depth: cfg.d,
        nz: cfg.nz,
        scheme: cfg.scheme,
        substeps: cfg.nt_substeps,
        tail_coef,
        init,
        flips,
        hard: prep.hard.clone(),
        silent: prep.silent.clone(),
        range,
        keep_fields: cfg.keep_slices,
        keep_states,
    };

    let scheme = if prep.medium_flip.is_some() { ZScheme::Heun } else { cfg.scheme };
    let mut forward_spec = base(
        deltas.clone(),
        Init::Uniform(cfg.initial_pair()),
        (start.min(end_forward), end_forward),
        prep.flips.iter().copied().filter(|&j| j <= end_forward).collect(),
        prep.medium_flip.is_some(),
    );
    forward_spec.scheme = scheme;
    let forward = forward_spec.run(&prep.total.samples)?;

    let mut output = forward.output.clone();
    let mut slice_fields = forward.fields.clone();
    let mut final_populations = forward.mean_norms.clone();
    let mut return_slices = vec![];
    let mut max_substeps = forward.max_substeps;
    let mut gate_doublings = forward.gate_doublings;
    let mut step_error_estimate = forward.gate_estimate;

    if let Some(jm) = prep.medium_flip {
        let states = forward.states.expect("states kept for medium flip");
        let reversed: Vec<Vec<[C64; 2]>> = states.into_iter().rev().collect();
        let flipped_before = prep.flips.iter().filter(|&&j| j <= jm).count();
        let phase_deltas: Vec<f64> =
            if flipped_before % 2 == 1 { deltas.iter().map(|d| -d).collect() } else { deltas.clone() };
        let mut back_input = prep.total.samples.clone();
        for v in back_input[..jm].iter_mut() {
            *v = C64::new(0.0, 0.0);
        }
        let mut back_spec = base(
            phase_deltas,
            Init::PerSlice(reversed),
            (jm, grid.n - 1),
            prep.flips.iter().copied().filter(|&j| j > jm).collect(),
            false,
        );
        back_spec.scheme = ZScheme::Heun;
        let back = back_spec.run(&back_input)?;
        output[jm..].copy_from_slice(&back.output[jm..]);
        if let (Some(f), Some(bf)) = (slice_fields.as_mut(), back.fields.as_ref()) {
            f.extend(bf.iter().cloned());
        }
        final_populations = back.mean_norms;
        return_slices = back.diagnostics;
        max_substeps = max_substeps.max(back.max_substeps);
        gate_doublings = gate_doublings.max(back.gate_doublings);
        step_error_estimate = step_error_estimate.max(back.gate_estimate);
    }

    Ok(SimulationResult {
        input: prep.total,
        output: ComplexEnvelope { grid, samples: output },
        slices: forward.diagnostics,
        return_slices,
        slice_fields: slice_fields.map(|v| v.into_iter().map(|samples| ComplexEnvelope { grid, samples }).collect()),
        class_detunings: deltas,
        class_weights: weights,
        final_populations,
        convergence: ConvergenceInfo {
            nz: cfg.nz,
            nclasses: classes.len(),
            scheme,
            max_substeps,
            gate_doublings,
            step_error_estimate,
            nz_doubling_change: None,
        },
    })
}

/// Signed pulse area per slice: the complex area projected on the phase of the
/// entrance area.
pub fn pulse_area_profile(result: &SimulationResult) -> Vec<(f64, f64)> {
    let a0 = result
        .slices
        .first()
        .map(|s| C64::new(s.area_re, s.area_im))
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = if a0.norm() > 0.0 { a0.conj() / a0.norm() } else { C64::new(1.0, 0.0) };
    result
        .slices
        .iter()
        .map(|s| (s.z, (C64::new(s.area_re, s.area_im) * phase).re))
        .collect()
}
