//! Perturbative Λ-system ensembles: optical coherence `P` and spin coherence
//! `S` driven by a weak signal and a z-independent control field, plus the
//! closed-form EIT and Raman propagation constants.

use serde::{Deserialize, Serialize};

use crate::numcore::march::{Init, MarchSpec, System};
use crate::numcore::transfer::lambda_exponent;
use crate::numcore::{eit_width, raman_width, ComplexEnvelope, DetuningDistribution, PulseShape, ZScheme};
use crate::twolevel::{relative_change, ConvergenceInfo, PropagationConfig, SimulationResult};
use crate::{Error, Result, C64};

/// Optical and spin coherences of one class.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LambdaState {
    pub p: C64,
    pub s: C64,
}

impl LambdaState {
    pub fn new(p: C64, s: C64) -> Self {
        Self { p, s }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p.norm_sqr() + self.s.norm_sqr()
    }
}

/// One piece of the control field `Ω(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ControlSegment {
    /// Constant Rabi frequency on `[start, end)`; a missing bound is unbounded.
    Constant {
        rabi: f64,
        #[serde(default)]
        start: Option<f64>,
        #[serde(default)]
        end: Option<f64>,
    },
    /// A rendered pulse, e.g. a Raman π-pulse.
    Pulse { shape: PulseShape },
}

impl ControlSegment {
    fn value_at(&self, t: f64) -> C64 {
        match *self {
            ControlSegment::Constant { rabi, start, end } => {
                let after = start.is_none_or(|s| t >= s);
                let before = end.is_none_or(|e| t < e);
                if after && before {
                    C64::new(rabi, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            ControlSegment::Pulse { shape } => shape.value_at(t),
        }
    }
}

/// Control field and detunings of a Λ-system run. Segments add up where they overlap.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    #[serde(default)]
    pub segments: Vec<ControlSegment>,
    /// One-photon detuning Δ, added to every class detuning.
    #[serde(default)]
    pub one_photon: f64,
    /// Two-photon detuning δ of the spin coherence.
    #[serde(default)]
    pub two_photon: f64,
    /// Spin decay rate; zero for ideal storage.
    #[serde(default)]
    pub spin_decay: f64,
}

impl ControlSchedule {
    pub fn dark() -> Self {
        Self::default()
    }

    /// Constant control `rabi` switched off at `off` and back on at `on`.
    pub fn switched(rabi: f64, off: f64, on: f64) -> Self {
        Self {
            segments: vec![
                ControlSegment::Constant { rabi, start: None, end: Some(off) },
                ControlSegment::Constant { rabi, start: Some(on), end: None },
            ],
            ..Self::default()
        }
    }

    pub fn with_detunings(mut self, one_photon: f64, two_photon: f64) -> Self {
        self.one_photon = one_photon;
        self.two_photon = two_photon;
        self
    }

    pub fn rabi_at(&self, t: f64) -> C64 {
        self.segments.iter().map(|s| s.value_at(t)).sum()
    }

    /// Times at which the control switches abruptly.
    pub fn switch_times(&self) -> Vec<f64> {
        let mut out = vec![];
        for s in &self.segments {
            if let ControlSegment::Constant { start, end, .. } = s {
                out.extend(start.iter().chain(end.iter()).copied());
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.segments {
            match s {
                ControlSegment::Constant { rabi, start, end } => {
                    if !rabi.is_finite() {
                        return Err(Error::InvalidParameter("control Rabi frequency must be finite".into()));
                    }
                    if let (Some(a), Some(b)) = (start, end) {
                        if !(b > a) {
                            return Err(Error::OrderingViolation(format!("control segment ends at {b} before it starts at {a}")));
                        }
                    }
                }
                ControlSegment::Pulse { shape } => shape.validate()?,
            }
        }
        if !self.one_photon.is_finite() || !self.two_photon.is_finite() || !(self.spin_decay >= 0.0) {
            return Err(Error::InvalidParameter("detunings must be finite and spin decay >= 0".into()));
        }
        Ok(())
    }

    fn spin_rate(&self) -> C64 {
        C64::new(-self.spin_decay, self.two_photon)
    }
}

#[allow(clippy::too_many_arguments)]
fn spec<'a>(
    grid: crate::numcore::TimeGrid,
    deltas: Vec<f64>,
    weights: Vec<f64>,
    gamma: f64,
    schedule: &ControlSchedule,
    control: &'a (dyn Fn(f64) -> C64 + Sync),
    cfg: Option<&PropagationConfig>,
    tail_coef: f64,
    init: [C64; 2],
    range: (usize, usize),
) -> MarchSpec<'a> {
    MarchSpec {
        system: System::Lambda,
        grid,
        deltas,
        weights,
        gamma,
        spin_rate: schedule.spin_rate(),
        control: Some(control),
        depth: cfg.map_or(0.0, |c| c.d),
        nz: cfg.map_or(1, |c| c.nz),
        scheme: cfg.map_or(ZScheme::Heun, |c| c.scheme),
        substeps: cfg.map_or(4, |c| c.nt_substeps),
        tail_coef,
        init: Init::Uniform(init),
        flips: vec![],
        hard: vec![],
        silent: vec![],
        range,
        keep_fields: cfg.is_some_and(|c| c.keep_slices),
        keep_states: false,
    }
}

/// Integrate one Λ class (one-photon detuning `delta` on top of the schedule's)
/// driven by `field`, returning the state at every grid sample.
pub fn evolve_lambda(
    state: LambdaState,
    field: &ComplexEnvelope,
    schedule: &ControlSchedule,
    delta: f64,
    gamma: f64,
) -> Result<Vec<LambdaState>> {
    schedule.validate()?;
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("decay rate must be >= 0, got {gamma}")));
    }
    let control = |t: f64| schedule.rabi_at(t);
    let s = spec(
        field.grid,
        vec![delta + schedule.one_photon],
        vec![0.0],
        gamma,
        schedule,
        &control,
        None,
        0.0,
        [state.p, state.s],
        (0, field.grid.n - 1),
    );
    let (traj, _) = s.class_trajectory(&field.samples, 0)?;
    Ok(traj.into_iter().map(|x| LambdaState { p: x[0], s: x[1] }).collect())
}

/// Propagate a weak signal through a Λ ensemble. The optical decay is
/// `cfg.decay`; a homogeneous medium of linewidth Γ is `DetuningDistribution::delta_resonant(Γ)`.
pub fn propagate_lambda(
    input: &ComplexEnvelope,
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    schedule: &ControlSchedule,
) -> Result<SimulationResult> {
    propagate_lambda_until(input, cfg, dist, schedule, None)
}

/// As [`propagate_lambda`], but only marches up to the sample at or after
/// `stop`; later output samples are left at the input values.
pub(crate) fn propagate_lambda_until(
    input: &ComplexEnvelope,
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    schedule: &ControlSchedule,
    stop: Option<f64>,
) -> Result<SimulationResult> {
    let result = propagate_lambda_once(input, cfg, dist, schedule, stop)?;
    if !cfg.convergence_gate {
        return Ok(result);
    }
    let fine_cfg = PropagationConfig { nz: 2 * cfg.nz, convergence_gate: false, keep_slices: false, ..*cfg };
    let fine = propagate_lambda_once(input, &fine_cfg, dist, schedule, stop)?;
    let change = relative_change(result.output.energy(), fine.output.energy());
    if change >= 0.01 {
        return Err(Error::ConvergenceNotMet { what: "nz".into(), change });
    }
    let mut result = result;
    result.convergence.nz_doubling_change = Some(change);
    Ok(result)
}

fn propagate_lambda_once(
    input: &ComplexEnvelope,
    cfg: &PropagationConfig,
    dist: &DetuningDistribution,
    schedule: &ControlSchedule,
    stop: Option<f64>,
) -> Result<SimulationResult> {
    cfg.validate()?;
    dist.validate()?;
    schedule.validate()?;
    let grid = input.grid;
    let classes = dist.classes();
    let deltas: Vec<f64> = classes.iter().map(|c| c.delta + schedule.one_photon).collect();
    let weights: Vec<f64> = classes.iter().map(|c| c.weight).collect();
    // Far classes respond linearly and only when the one-photon detuning leaves the span symmetric.
    let tail_coef = if schedule.one_photon == 0.0 {
        cfg.d / (2.0 * std::f64::consts::PI) * dist.tail_integral()
    } else {
        0.0
    };
    let start = input.samples.iter().position(|e| e.norm() > 0.0).unwrap_or(grid.n - 1).saturating_sub(2);
    let end = stop.map_or(grid.n - 1, |t| (((t - grid.t0) / grid.dt).ceil().max(0.0) as usize).clamp(start, grid.n - 1));
    let control = |t: f64| schedule.rabi_at(t);
    let mut s = spec(
        grid,
        deltas,
        weights.clone(),
        cfg.decay,
        schedule,
        &control,
        Some(cfg),
        tail_coef,
        [C64::new(0.0, 0.0); 2],
        (start, end),
    );
    s.scheme = cfg.scheme;
    let out = s.run(&input.samples)?;
    Ok(SimulationResult {
        input: input.clone(),
        output: ComplexEnvelope { grid, samples: out.output },
        slices: out.diagnostics,
        return_slices: vec![],
        slice_fields: out.fields.map(|v| v.into_iter().map(|samples| ComplexEnvelope { grid, samples }).collect()),
        class_detunings: classes.iter().map(|c| c.delta).collect(),
        class_weights: weights,
        final_populations: out.mean_norms,
        convergence: ConvergenceInfo {
            nz: cfg.nz,
            nclasses: classes.len(),
            scheme: cfg.scheme,
            max_substeps: out.max_substeps,
            gate_doublings: out.gate_doublings,
            step_error_estimate: out.gate_estimate,
            nz_doubling_change: None,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaKind {
    Eit,
    Raman,
}

/// Homogeneous Λ-medium parameters for the closed-form propagation constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaParams {
    pub d: f64,
    pub gamma: f64,
    pub rabi: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub two_photon: f64,
}

impl LambdaParams {
    pub fn eit(d: f64, gamma: f64, rabi: f64) -> Self {
        Self { d, gamma, rabi, detuning: 0.0, two_photon: 0.0 }
    }

    pub fn raman(d: f64, gamma: f64, rabi: f64, detuning: f64, two_photon: f64) -> Self {
        Self { d, gamma, rabi, detuning, two_photon }
    }

    /// Width of the transparency (EIT) or absorption (Raman) feature.
    pub fn width(&self, kind: LambdaKind) -> f64 {
        match kind {
            LambdaKind::Eit => eit_width(self.rabi, self.gamma),
            LambdaKind::Raman => raman_width(self.rabi, self.gamma, self.detuning),
        }
    }

    fn validate(&self, kind: LambdaKind) -> Result<()> {
        if !(self.gamma > 0.0) || !(self.rabi > 0.0) || !(self.d >= 0.0) {
            return Err(Error::InvalidParameter("Γ and Ω must be positive and d >= 0".into()));
        }
        if kind == LambdaKind::Raman && self.detuning.abs() < 10.0 * self.gamma {
            return Err(Error::RamanConditionViolated { delta: self.detuning, gamma10: 10.0 * self.gamma });
        }
        Ok(())
    }
}

/// Exact integrated propagation constant `α̃(ω)L` of a homogeneous Λ medium.
pub fn susceptibility(kind: LambdaKind, omega: f64, p: &LambdaParams) -> Result<C64> {
    p.validate(kind)?;
    Ok(lambda_exponent(p.d, p.gamma, p.rabi, p.detuning, p.two_photon, omega))
}

/// First-order form: inverted Lorentzian of width Γ_EIT, or Lorentzian of width
/// Γ_R centred on the light-shifted Raman line.
pub fn first_order_susceptibility(kind: LambdaKind, omega: f64, p: &LambdaParams) -> C64 {
    let i = C64::i();
    let half_d = 0.5 * p.d;
    let w = p.width(kind);
    match kind {
        LambdaKind::Eit => -half_d * i * omega / (w + i * omega),
        LambdaKind::Raman => {
            let shift = p.two_photon - crate::numcore::light_shift(p.rabi, p.detuning);
            -half_d * w / (w + i * (omega - shift))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{apply_transfer, TimeGrid, TransferFunction};
    use std::f64::consts::PI;

    #[test]
    fn spin_is_frozen_without_fields() {
        let grid = TimeGrid::covering(0.0, 10.0, 0.05).unwrap();
        let field = ComplexEnvelope::zeros(grid);
        let x0 = LambdaState::new(C64::new(0.3, 0.1), C64::new(0.2, -0.4));
        let traj = evolve_lambda(x0, &field, &ControlSchedule::dark(), 0.0, 0.5).unwrap();
        for (j, x) in traj.iter().enumerate() {
            let t = grid.t(j) - grid.t0;
            assert!((x.p.norm() - x0.p.norm() * (-0.5 * t).exp()).abs() < 1e-12);
            assert!((x.s - x0.s).norm() < 1e-14);
        }
    }

    #[test]
    fn raman_pi_pulse_swaps_coherences() {
        let grid = TimeGrid::covering(-6.0, 6.0, 0.01).unwrap();
        let field = ComplexEnvelope::zeros(grid);
        let pulse = PulseShape::gaussian(0.0, 0.5, PI);
        let schedule = ControlSchedule { segments: vec![ControlSegment::Pulse { shape: pulse }], ..Default::default() };
        let traj = evolve_lambda(LambdaState::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)), &field, &schedule, 0.0, 0.0)
            .unwrap();
        let end = traj.last().unwrap();
        assert!(end.p.norm() < 1e-6);
        assert!((end.s - C64::new(0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn steady_state_matches_eit_response() {
        let (gamma, rabi, omega) = (4.0, 4.0, 0.7);
        let grid = TimeGrid::new(0.0, 0.01, 1 << 14).unwrap();
        // Switch the probe on smoothly so the transient has decayed at the end.
        let field = ComplexEnvelope::from_fn(grid, |t| {
            let ramp = 0.5 * (1.0 + ((t - 30.0) / 5.0).tanh());
            C64::from_polar(1e-3 * ramp, omega * t)
        });
        let schedule = ControlSchedule { segments: vec![ControlSegment::Constant { rabi, start: None, end: None }], ..Default::default() };
        let traj = evolve_lambda(LambdaState::default(), &field, &schedule, 0.0, gamma).unwrap();
        let j = grid.n - 1;
        let t = grid.t(j);
        // Linear solve of the driven steady state at frequency ω.
        let i = C64::i();
        let e = C64::from_polar(1e-3, omega * t);
        let den = (i * omega + gamma) - i * rabi * rabi / (4.0 * omega);
        let p_expected = -i * e / (2.0 * den);
        assert!((traj[j].p - p_expected).norm() / p_expected.norm() < 1e-4, "{:?} vs {:?}", traj[j].p, p_expected);
    }

    #[test]
    fn dark_lambda_matches_lorentzian_transfer() {
        let grid = TimeGrid::covering(-1.0, 14.0, 0.0025).unwrap();
        let input = PulseShape::gaussian(0.0, 0.05, 0.01).render(&grid).unwrap();
        let cfg = PropagationConfig { decay: 1.0, ..PropagationConfig::new(20.0, 200) };
        let out = propagate_lambda(&input, &cfg, &DetuningDistribution::delta_resonant(1.0), &ControlSchedule::dark()).unwrap();
        let reference = apply_transfer(&input, &TransferFunction::lorentzian(20.0, 1.0)).unwrap();
        let rel = (out.output.energy() - reference.energy()).abs() / reference.energy();
        assert!(rel < 0.01, "relative energy mismatch {rel}");
    }

    #[test]
    fn eit_width_and_transparency() {
        let p = LambdaParams::eit(20.0, 4.0, 4.0);
        assert!((p.width(LambdaKind::Eit) - 1.0).abs() < 1e-15);
        assert_eq!(susceptibility(LambdaKind::Eit, 0.0, &p).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn raman_gate() {
        let p = LambdaParams::raman(20.0, 10.0, 50.0, 50.0, 0.0);
        assert!(matches!(susceptibility(LambdaKind::Raman, 0.0, &p), Err(Error::RamanConditionViolated { .. })));
    }
}
