//! Slice-by-slice Maxwell–Bloch integration shared by the two-level and
//! Λ-system solvers.
//!
//! Every detuning class carries a two-component state `x` obeying
//! `ẋ = D x + C(t) x + f(t)` with `D` diagonal and constant between events.
//! Time stepping uses the Lawson (integrating-factor) form of RK4 so that the
//! free precession and decay in `D` are exact. The field at the sub-step nodes
//! comes from cubic interpolation of the sampled envelope. Along `z` the field
//! obeys `∂ζE = −i d Σ_k w_k P_k − c_tail ∂tE`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TimeGrid;
use crate::{Error, Result, C64};

const CHUNK: usize = 64;
const MAX_LEVEL: usize = 14;
const MAX_GATE_DOUBLINGS: u32 = 6;
const GATE_TOL: f64 = 1e-6;
const FREE_THRESHOLD: f64 = 1e-13;
const EDGE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum System {
    /// `x = (Cg, Ce)`, `P = Cg*·Ce`.
    TwoLevel,
    /// `x = (P, S)` driven by the field through `f = (−iE/2, 0)`.
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZScheme {
    /// Trapezoidal predictor–corrector, two source evaluations per slice.
    #[default]
    Heun,
    /// Classical RK4 in `z`; requires atoms that start identical at every slice.
    Rk4,
}

pub(crate) enum Init {
    Uniform([C64; 2]),
    PerSlice(Vec<Vec<[C64; 2]>>),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct HardRotation {
    pub index: usize,
    pub area: f64,
    pub phase: f64,
}

pub(crate) type ControlFn<'a> = &'a (dyn Fn(f64) -> C64 + Sync);

pub(crate) struct MarchSpec<'a> {
    pub system: System,
    pub grid: TimeGrid,
    pub deltas: Vec<f64>,
    pub weights: Vec<f64>,
    pub gamma: f64,
    /// Diagonal rate of the spin coherence (Λ only), `iδ − γ_s`.
    pub spin_rate: C64,
    pub control: Option<ControlFn<'a>>,
    pub depth: f64,
    pub nz: usize,
    pub scheme: ZScheme,
    pub substeps: usize,
    pub tail_coef: f64,
    pub init: Init,
    pub flips: Vec<usize>,
    pub hard: Vec<HardRotation>,
    pub silent: Vec<(usize, usize)>,
    /// Inclusive sample range integrated; states are reported at `range.1`.
    pub range: (usize, usize),
    pub keep_fields: bool,
    pub keep_states: bool,
}

/// Per-slice summary of the propagating field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceDiagnostics {
    pub z: f64,
    pub energy: f64,
    pub area_re: f64,
    pub area_im: f64,
    pub abs_area: f64,
}

pub(crate) struct MarchOutput {
    pub output: Vec<C64>,
    pub fields: Option<Vec<Vec<C64>>>,
    pub diagnostics: Vec<SliceDiagnostics>,
    pub states: Option<Vec<Vec<[C64; 2]>>>,
    /// `(|x1|², |x2|²)` per class at the end of the range, averaged over slices.
    pub mean_norms: Vec<[f64; 2]>,
    pub max_substeps: usize,
    pub gate_doublings: u32,
    pub gate_estimate: f64,
}

#[derive(Clone, Copy)]
struct Factors {
    eh1: C64,
    ef1: C64,
    eh2: C64,
    ef2: C64,
}

/// Node coefficients `(c12, c21, f1)` of `ẋ1 = c12 x2 + f1`, `ẋ2 = c21 x1`.
type Node = [C64; 3];

struct Plan {
    nodes: Vec<Node>,
    offsets: Vec<usize>,
    /// Substep level per interval; `u8::MAX` marks free evolution.
    levels: Vec<u8>,
}

const FREE: u8 = u8::MAX;

struct Engine<'a> {
    spec: &'a MarchSpec<'a>,
    /// `factors[sign][level][class]`.
    factors: [Vec<Vec<Factors>>; 2],
    max_detuning: f64,
}

/// Field inside interval `[j, j+1]` at fraction `u`: cubic Lagrange through
/// `j−1..j+2`, quadratic at the grid edges.
fn cubic(field: &[C64], j: usize, u: f64) -> C64 {
    let n = field.len();
    if n < 3 {
        return field[j] * (1.0 - u) + field[(j + 1).min(n - 1)] * u;
    }
    if j == 0 {
        let (l0, l1, l2) = ((u - 1.0) * (u - 2.0) / 2.0, -u * (u - 2.0), u * (u - 1.0) / 2.0);
        return field[0] * l0 + field[1] * l1 + field[2] * l2;
    }
    if j + 2 >= n {
        let (lm, l0, l1) = (u * (u - 1.0) / 2.0, -(u + 1.0) * (u - 1.0), (u + 1.0) * u / 2.0);
        return field[j - 1] * lm + field[j] * l0 + field[j + 1] * l1;
    }
    let lm = -u * (u - 1.0) * (u - 2.0) / 6.0;
    let l0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    let l1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    let l2 = (u + 1.0) * u * (u - 1.0) / 6.0;
    field[j - 1] * lm + field[j] * l0 + field[j + 1] * l1 + field[j + 2] * l2
}

/// Extra substep doublings on strong and weak intervals.
type Mult = (u32, u32);

impl<'a> Engine<'a> {
    fn new(spec: &'a MarchSpec<'a>) -> Self {
        let dt = spec.grid.dt;
        let make = |sign: f64| -> Vec<Vec<Factors>> {
            (0..=MAX_LEVEL)
                .map(|level| {
                    let h = dt / (1u64 << level) as f64;
                    spec.deltas
                        .iter()
                        .map(|&delta| {
                            let (d1, d2) = spec.rates(sign * delta);
                            Factors {
                                eh1: (d1 * 0.5 * h).exp(),
                                ef1: (d1 * h).exp(),
                                eh2: (d2 * 0.5 * h).exp(),
                                ef2: (d2 * h).exp(),
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let max_detuning = spec
            .deltas
            .iter()
            .map(|d| d.abs())
            .fold(0.0, f64::max)
            .max(spec.spin_rate.im.abs());
        Self { spec, factors: [make(1.0), make(-1.0)], max_detuning }
    }

    fn coefficients(&self, e: C64, omega: C64) -> Node {
        let mi = C64::new(0.0, -0.5);
        match self.spec.system {
            System::TwoLevel => [mi * e.conj(), mi * e, C64::new(0.0, 0.0)],
            System::Lambda => [mi * omega, mi * omega.conj(), mi * e],
        }
    }

    fn plan(&self, field: &[C64], multiplier: Mult) -> Plan {
        let spec = self.spec;
        let grid = spec.grid;
        let (j0, j1) = spec.range;
        let emax = field.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let omega_at = |t: f64| spec.control.map_or(C64::new(0.0, 0.0), |c| c(t));
        let omax = if spec.control.is_some() {
            (j0..=j1).map(|j| omega_at(grid.t(j)).norm()).fold(0.0, f64::max)
        } else {
            0.0
        };
        let e_floor = FREE_THRESHOLD * emax;
        let o_floor = FREE_THRESHOLD * omax.max(1e-300);
        let mut nodes = Vec::new();
        let mut offsets = Vec::with_capacity(j1 - j0 + 1);
        let mut levels = Vec::with_capacity(j1 - j0);
        for j in j0..j1 {
            offsets.push(nodes.len());
            let t = grid.t(j);
            let lo = j.saturating_sub(1);
            let hi = (j + 2).min(grid.n - 1);
            let emag = field[lo..=hi].iter().map(|e| e.norm()).fold(0.0, f64::max);
            let omag = if spec.control.is_some() {
                omega_at(t + EDGE * grid.dt)
                    .norm()
                    .max(omega_at(t + 0.5 * grid.dt).norm())
                    .max(omega_at(t + (1.0 - EDGE) * grid.dt).norm())
            } else {
                0.0
            };
            if emag <= e_floor && omag <= o_floor {
                levels.push(FREE);
                continue;
            }
            let c = 0.5 * (emag + omag);
            let strong = c * grid.dt > 1e-2;
            let mut level = 0usize;
            let base = if strong { spec.substeps.max(1) } else { 1 };
            while (1usize << level) < base {
                level += 1;
            }
            loop {
                let h = grid.dt / (1u64 << level) as f64;
                if (h * c <= 0.05 && h * (c + self.max_detuning) <= 1.0) || level >= MAX_LEVEL {
                    break;
                }
                level += 1;
            }
            let extra = if strong { multiplier.0 } else { multiplier.1 };
            level = (level + extra as usize).min(MAX_LEVEL);
            levels.push(level as u8);
            let s = 1usize << level;
            for m in 0..=2 * s {
                let u = m as f64 / (2 * s) as f64;
                let e = cubic(field, j, u);
                // Controls may switch exactly on a sample; read them from inside the interval.
                let om = omega_at(t + u.clamp(EDGE, 1.0 - EDGE) * grid.dt);
                nodes.push(self.coefficients(e, om));
            }
        }
        offsets.push(nodes.len());
        Plan { nodes, offsets, levels }
    }

    #[inline(always)]
    fn polarization(&self, x: [C64; 2]) -> C64 {
        match self.spec.system {
            System::TwoLevel => x[0].conj() * x[1],
            System::Lambda => x[0],
        }
    }

    /// Advance one class across interval `i` of the plan.
    #[inline(always)]
    fn advance(&self, plan: &Plan, i: usize, sign: usize, k: usize, x: &mut [C64; 2]) {
        let level = plan.levels[i];
        if level == FREE {
            let f = &self.factors[sign][0][k];
            x[0] *= f.ef1;
            x[1] *= f.ef2;
            return;
        }
        let level = level as usize;
        let f = self.factors[sign][level][k];
        let s = 1usize << level;
        let h = self.spec.grid.dt / s as f64;
        let h2 = 0.5 * h;
        let nodes = &plan.nodes[plan.offsets[i]..];
        let rhs = |c: &Node, y0: C64, y1: C64| -> (C64, C64) { (c[0] * y1 + c[2], c[1] * y0) };
        let (mut a, mut b) = (x[0], x[1]);
        for m in 0..s {
            let n0 = &nodes[2 * m];
            let nh = &nodes[2 * m + 1];
            let n1 = &nodes[2 * m + 2];
            let (k1a, k1b) = rhs(n0, a, b);
            let (k2a, k2b) = rhs(nh, f.eh1 * (a + h2 * k1a), f.eh2 * (b + h2 * k1b));
            let (ea, eb) = (f.eh1 * a, f.eh2 * b);
            let (k3a, k3b) = rhs(nh, ea + h2 * k2a, eb + h2 * k2b);
            let (fa, fb) = (f.ef1 * a, f.ef2 * b);
            let (k4a, k4b) = rhs(n1, fa + h * f.eh1 * k3a, fb + h * f.eh2 * k3b);
            let h6 = h / 6.0;
            a = fa + h6 * (f.ef1 * k1a + 2.0 * f.eh1 * (k2a + k3a) + k4a);
            b = fb + h6 * (f.ef2 * k1b + 2.0 * f.eh2 * (k2b + k3b) + k4b);
        }
        x[0] = a;
        x[1] = b;
    }

    fn rotate(x: &mut [C64; 2], area: f64, phase: f64) {
        let (s, c) = (0.5 * area).sin_cos();
        let mis = C64::new(0.0, -s);
        let a = x[0];
        let b = x[1];
        x[0] = c * a + mis * C64::from_polar(1.0, -phase) * b;
        x[1] = mis * C64::from_polar(1.0, phase) * a + c * b;
    }

    /// Run classes `ks` through the plan, returning the weighted polarization sum
    /// over the range and the final states.
    fn run_chunk(
        &self,
        plan: &Plan,
        ks: std::ops::Range<usize>,
        init: &dyn Fn(usize) -> [C64; 2],
    ) -> (Vec<C64>, Vec<[C64; 2]>) {
        let spec = self.spec;
        let (j0, j1) = spec.range;
        let mut xs: Vec<[C64; 2]> = ks.clone().map(init).collect();
        let mut acc = vec![C64::new(0.0, 0.0); j1 - j0 + 1];
        let mut sign = 0usize;
        let weights = &spec.weights[ks.clone()];
        let record = |acc: &mut C64, xs: &[[C64; 2]]| {
            let mut s = C64::new(0.0, 0.0);
            for (x, w) in xs.iter().zip(weights) {
                s += *w * self.polarization(*x);
            }
            *acc = s;
        };
        for h in spec.hard.iter().filter(|h| h.index == j0) {
            for x in xs.iter_mut() {
                Self::rotate(x, h.area, h.phase);
            }
        }
        record(&mut acc[0], &xs);
        for i in 0..(j1 - j0) {
            for (local, x) in xs.iter_mut().enumerate() {
                self.advance(plan, i, sign, ks.start + local, x);
            }
            let j = j0 + i + 1;
            if spec.flips.contains(&j) {
                sign ^= 1;
            }
            for h in spec.hard.iter().filter(|h| h.index == j) {
                for x in xs.iter_mut() {
                    Self::rotate(x, h.area, h.phase);
                }
            }
            record(&mut acc[i + 1], &xs);
        }
        (acc, xs)
    }

    /// Source term `∂ζE` for one slice and the class states at the end of the range.
    fn evaluate(&self, field: &[C64], plan: &Plan, slice_init: Option<&[[C64; 2]]>) -> (Vec<C64>, Vec<[C64; 2]>) {
        let spec = self.spec;
        let m = spec.deltas.len();
        let uniform = match &spec.init {
            Init::Uniform(x) => *x,
            Init::PerSlice(_) => [C64::new(0.0, 0.0); 2],
        };
        let init = |k: usize| -> [C64; 2] { slice_init.map_or(uniform, |s| s[k]) };
        let nchunks = m.div_ceil(CHUNK);
        let parts: Vec<(Vec<C64>, Vec<[C64; 2]>)> = (0..nchunks)
            .into_par_iter()
            .map(|c| self.run_chunk(plan, c * CHUNK..((c + 1) * CHUNK).min(m), &init))
            .collect();
        let (j0, j1) = spec.range;
        let mut source = vec![C64::new(0.0, 0.0); spec.grid.n];
        let mut states = Vec::with_capacity(m);
        for (acc, xs) in parts {
            for (i, v) in acc.iter().enumerate() {
                source[j0 + i] += v;
            }
            states.extend(xs);
        }
        let scale = C64::new(0.0, -spec.depth);
        for v in source[j0..=j1].iter_mut() {
            *v *= scale;
        }
        if spec.tail_coef != 0.0 {
            let inv = 0.5 / spec.grid.dt;
            let n = field.len();
            // Far-detuned classes follow hard rotations: their inversion scales by cos θ.
            let mut rotations: Vec<(usize, f64)> = spec.hard.iter().map(|h| (h.index, h.area.cos())).collect();
            rotations.sort_by_key(|r| r.0);
            for j in j0..=j1 {
                let factor: f64 = rotations.iter().take_while(|r| r.0 < j).map(|r| r.1).product();
                let prev = if j > 0 { field[j - 1] } else { C64::new(0.0, 0.0) };
                let next = if j + 1 < n { field[j + 1] } else { C64::new(0.0, 0.0) };
                source[j] -= spec.tail_coef * factor * (next - prev) * inv;
            }
        }
        for &(a, b) in &spec.silent {
            for v in source[a.max(j0)..=b.min(j1)].iter_mut() {
                *v = C64::new(0.0, 0.0);
            }
        }
        (source, states)
    }

    fn trajectory(&self, plan: &Plan, k: usize, mut x: [C64; 2]) -> Vec<[C64; 2]> {
        let (j0, j1) = self.spec.range;
        let mut sign = 0;
        let mut out = Vec::with_capacity(j1 - j0 + 1);
        for h in self.spec.hard.iter().filter(|h| h.index == j0) {
            Self::rotate(&mut x, h.area, h.phase);
        }
        out.push(x);
        for i in 0..(j1 - j0) {
            self.advance(plan, i, sign, k, &mut x);
            let j = j0 + i + 1;
            if self.spec.flips.contains(&j) {
                sign ^= 1;
            }
            for h in self.spec.hard.iter().filter(|h| h.index == j) {
                Self::rotate(&mut x, h.area, h.phase);
            }
            out.push(x);
        }
        out
    }

    /// Smallest substep multipliers (strong, weak intervals) passing the gate,
    /// with the error estimate. The larger contribution is refined first.
    fn step_gate(&self, field: &[C64], slice_init: Option<&[[C64; 2]]>) -> Result<(Mult, f64)> {
        let mut mult: Mult = (0, 0);
        loop {
            let coarse = self.plan(field, mult);
            let es = self.gate_error(field, &coarse, (mult.0 + 1, mult.1), slice_init);
            let ew = self.gate_error(field, &coarse, (mult.0, mult.1 + 1), slice_init);
            let estimate = es + ew;
            if estimate <= GATE_TOL {
                return Ok((mult, estimate));
            }
            if es >= ew {
                mult.0 += 1;
            } else {
                mult.1 += 1;
            }
            if mult.0.max(mult.1) > MAX_GATE_DOUBLINGS {
                return Err(Error::StepTooCoarse { estimate, doublings: MAX_GATE_DOUBLINGS });
            }
        }
    }

    /// Compare a plan against one with refined substeps on probe classes.
    fn gate_error(&self, field: &[C64], coarse: &Plan, refined: Mult, slice_init: Option<&[[C64; 2]]>) -> f64 {
        let m = self.spec.deltas.len();
        let mut probes: Vec<usize> = if m <= 5 { (0..m).collect() } else { vec![0, m / 4, m / 2, 3 * m / 4, m - 1] };
        probes.dedup();
        let fine = self.plan(field, refined);
        let uniform = match &self.spec.init {
            Init::Uniform(x) => *x,
            Init::PerSlice(_) => [C64::new(0.0, 0.0); 2],
        };
        let mut worst: f64 = 0.0;
        for &k in &probes {
            let x0 = slice_init.map_or(uniform, |s| s[k]);
            let a = self.trajectory(coarse, k, x0);
            let b = self.trajectory(&fine, k, x0);
            let scale = a
                .iter()
                .map(|x| x[0].norm().max(x[1].norm()))
                .fold(0.0, f64::max)
                .max(1e-300);
            let diff = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x[0] - y[0]).norm().max((x[1] - y[1]).norm()))
                .fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
        worst
    }
}

impl<'a> MarchSpec<'a> {
    fn rates(&self, delta: f64) -> (C64, C64) {
        let optical = C64::new(-self.gamma, delta);
        match self.system {
            System::TwoLevel => (C64::new(0.0, 0.0), optical),
            System::Lambda => (optical, self.spin_rate),
        }
    }

    fn slice_init(&self, k: usize) -> Option<&[[C64; 2]]> {
        match &self.init {
            Init::Uniform(_) => None,
            Init::PerSlice(v) => Some(&v[k.min(v.len() - 1)]),
        }
    }

    /// Trajectory of class `k` at every sample of the range, driven by `field`
    /// without propagation. Returns the states and the step-gate estimate.
    pub(crate) fn class_trajectory(&self, field: &[C64], k: usize) -> Result<(Vec<[C64; 2]>, f64)> {
        if field.len() != self.grid.n || k >= self.deltas.len() {
            return Err(Error::InvalidParameter("field length or class index out of range".into()));
        }
        let engine = Engine::new(self);
        let (multiplier, estimate) = engine.step_gate(field, self.slice_init(0))?;
        let plan = engine.plan(field, multiplier);
        let x0 = match &self.init {
            Init::Uniform(x) => *x,
            Init::PerSlice(v) => v[0][k],
        };
        let out = engine.trajectory(&plan, k, x0);
        Ok((out, estimate))
    }

    pub(crate) fn run(&self, input: &[C64]) -> Result<MarchOutput> {
        let n = self.grid.n;
        if input.len() != n {
            return Err(Error::InvalidParameter("input length does not match grid".into()));
        }
        if self.deltas.len() != self.weights.len() || self.deltas.is_empty() {
            return Err(Error::InvalidParameter("class detunings and weights mismatch".into()));
        }
        if self.range.1 >= n || self.range.0 > self.range.1 {
            return Err(Error::InvalidParameter("invalid integration range".into()));
        }
        if let Init::PerSlice(v) = &self.init {
            if v.len() != self.nz + 1 || v.iter().any(|s| s.len() != self.deltas.len()) {
                return Err(Error::InvalidParameter("per-slice initial states have wrong shape".into()));
            }
            if self.scheme == ZScheme::Rk4 {
                return Err(Error::InvalidParameter("RK4 in z requires uniform initial states".into()));
            }
        }
        let engine = Engine::new(self);
        let dz = 1.0 / self.nz as f64;

        let (multiplier, estimate) = engine.step_gate(input, self.slice_init(0))?;

        let mut max_level = 0u8;
        let mut eval = |field: &[C64], k: usize| -> (Vec<C64>, Vec<[C64; 2]>) {
            let plan = engine.plan(field, multiplier);
            max_level = max_level.max(plan.levels.iter().copied().filter(|&l| l != FREE).max().unwrap_or(0));
            engine.evaluate(field, &plan, self.slice_init(k))
        };

        let diag = |k: usize, e: &[C64]| -> SliceDiagnostics {
            let dt = self.grid.dt;
            let area: C64 = e.iter().sum::<C64>() * dt;
            SliceDiagnostics {
                z: k as f64 * dz,
                energy: e.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt,
                area_re: area.re,
                area_im: area.im,
                abs_area: e.iter().map(|v| v.norm()).sum::<f64>() * dt,
            }
        };

        let m = self.deltas.len();
        let mut e = input.to_vec();
        let mut fields = self.keep_fields.then(|| vec![e.clone()]);
        let mut states_out = self.keep_states.then(Vec::new);
        let mut diagnostics = vec![diag(0, &e)];
        let mut norm_sum = vec![[0.0f64; 2]; m];
        let accumulate = |xs: &[[C64; 2]], norm_sum: &mut Vec<[f64; 2]>| {
            for (acc, x) in norm_sum.iter_mut().zip(xs) {
                acc[0] += x[0].norm_sqr();
                acc[1] += x[1].norm_sqr();
            }
        };

        let axpy = |base: &[C64], s: &[C64], a: f64| -> Vec<C64> {
            base.iter().zip(s).map(|(b, v)| b + a * v).collect()
        };

        let (mut src, mut xs) = eval(&e, 0);
        for k in 0..self.nz {
            accumulate(&xs, &mut norm_sum);
            if let Some(st) = states_out.as_mut() {
                st.push(std::mem::take(&mut xs));
            }
            match self.scheme {
                ZScheme::Heun => {
                    let pred = axpy(&e, &src, dz);
                    let (src_pred, _) = eval(&pred, k + 1);
                    for j in 0..n {
                        e[j] += 0.5 * dz * (src[j] + src_pred[j]);
                    }
                }
                ZScheme::Rk4 => {
                    let (k2, _) = eval(&axpy(&e, &src, 0.5 * dz), k);
                    let (k3, _) = eval(&axpy(&e, &k2, 0.5 * dz), k);
                    let (k4, _) = eval(&axpy(&e, &k3, dz), k);
                    for j in 0..n {
                        e[j] += dz / 6.0 * (src[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                    }
                }
            }
            diagnostics.push(diag(k + 1, &e));
            if let Some(f) = fields.as_mut() {
                f.push(e.clone());
            }
            if k + 1 < self.nz || self.keep_states {
                let r = eval(&e, k + 1);
                src = r.0;
                xs = r.1;
            }
        }
        if self.keep_states {
            accumulate(&xs, &mut norm_sum);
            if let Some(st) = states_out.as_mut() {
                st.push(xs);
            }
        }
        let count = if self.keep_states { self.nz + 1 } else { self.nz } as f64;
        let mean_norms = norm_sum.iter().map(|v| [v[0] / count, v[1] / count]).collect();
        Ok(MarchOutput {
            output: e,
            fields,
            diagnostics,
            states: states_out,
            mean_norms,
            max_substeps: 1usize << max_level,
            gate_doublings: multiplier.0.max(multiplier.1),
            gate_estimate: estimate,
        })
    }
}
