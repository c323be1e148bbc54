//! Atomic-chain toy model: a single light mode passing N two-level atoms one
//! after the other, each through the exact Jaynes–Cummings propagator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fock::LEAK_TOLERANCE;
use crate::{Error, Result, C64};

/// Per-atom coupling above which the chain is no longer a good stand-in for a
/// continuous medium.
pub const COUPLING_WARNING: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainModel {
    /// Atom count N.
    pub atoms: usize,
    /// Total optical depth d; the per-atom coupling is κτ = √(d/N).
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainDirection {
    /// Atom 1 interacts first (`U_N…U_1`).
    Forward,
    /// Atom N interacts first (`U_1…U_N`).
    Backward,
}

impl ChainModel {
    pub fn new(atoms: usize, d: f64) -> Result<Self> {
        let m = Self { atoms, d };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms == 0 {
            return Err(Error::InvalidParameter("chain needs at least one atom".into()));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidParameter(format!("optical depth must be >= 0, got {}", self.d)));
        }
        Ok(())
    }

    pub fn kappa_tau(&self) -> f64 {
        (self.d / self.atoms as f64).sqrt()
    }

    /// Human-readable warnings for a coarse chain.
    pub fn warnings(&self) -> Vec<String> {
        let k = self.kappa_tau();
        if k > COUPLING_WARNING {
            vec![format!("per-atom coupling κτ = {k:.3} exceeds {COUPLING_WARNING}; increase the atom count")]
        } else {
            vec![]
        }
    }
}

/// Basis label: photon number and the sorted indices of excited atoms.
type Config = (u32, Vec<u32>);

/// Joint state of the light mode and the atoms, restricted to photon numbers
/// `≤ n_max`. Stored sparsely, so only states with a few excitations are cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct FockChainState {
    atoms: usize,
    n_max: usize,
    amps: BTreeMap<Config, C64>,
}

impl FockChainState {
    /// All atoms in `|g⟩`, `photons` in the mode.
    pub fn ground(atoms: usize, photons: u32, n_max: usize) -> Result<Self> {
        Self::basis(atoms, photons, vec![], n_max)
    }

    /// All atoms in `|e⟩`, the mode in vacuum.
    pub fn inverted(atoms: usize, n_max: usize) -> Result<Self> {
        Self::basis(atoms, 0, (0..atoms as u32).collect(), n_max)
    }

    /// A single basis state.
    pub fn basis(atoms: usize, photons: u32, mut excited: Vec<u32>, n_max: usize) -> Result<Self> {
        if photons as usize > n_max {
            return Err(Error::InvalidParameter(format!("{photons} photons exceed n_max={n_max}")));
        }
        excited.sort_unstable();
        excited.dedup();
        if excited.last().is_some_and(|&j| j as usize >= atoms) {
            return Err(Error::InvalidParameter("excited atom index out of range".into()));
        }
        let mut amps = BTreeMap::new();
        amps.insert((photons, excited), C64::new(1.0, 0.0));
        Ok(Self { atoms, n_max, amps })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitude(&self, photons: u32, excited: &[u32]) -> C64 {
        self.amps.get(&(photons, excited.to_vec())).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Keep only the components with `photons` in the mode (unnormalised).
    pub fn project_photons(&self, photons: u32) -> Self {
        let amps = self.amps.iter().filter(|(c, _)| c.0 == photons).map(|(c, a)| (c.clone(), *a)).collect();
        Self { atoms: self.atoms, n_max: self.n_max, amps }
    }

    /// Mean photon number ⟨a†a⟩ (for an unnormalised state, weighted by its norm).
    pub fn mean_photons(&self) -> f64 {
        self.amps.iter().map(|((n, _), a)| *n as f64 * a.norm_sqr()).sum()
    }

    /// Norm carried by each total-excitation sector (photons + excited atoms).
    pub fn excitation_sectors(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for ((n, ex), a) in &self.amps {
            *out.entry(*n as usize + ex.len()).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// Apply the Jaynes–Cummings propagator of atom `j`. Returns the norm
    /// pushed above `n_max`.
    fn apply_atom(&mut self, j: u32, theta: f64) -> f64 {
        let mut out: BTreeMap<Config, C64> = BTreeMap::new();
        let mut leak = 0.0;
        let add = |out: &mut BTreeMap<Config, C64>, c: Config, v: C64| {
            if v != C64::new(0.0, 0.0) {
                *out.entry(c).or_insert(C64::new(0.0, 0.0)) += v;
            }
        };
        for ((n, ex), a) in std::mem::take(&mut self.amps) {
            match ex.binary_search(&j) {
                Err(pos) => {
                    // |g,n⟩ → cos(θ√n)|g,n⟩ − sin(θ√n)|e,n−1⟩
                    let w = theta * (n as f64).sqrt();
                    if n > 0 {
                        let mut e = ex.clone();
                        e.insert(pos, j);
                        add(&mut out, (n - 1, e), -w.sin() * a);
                    }
                    add(&mut out, (n, ex), w.cos() * a);
                }
                Ok(pos) => {
                    // |e,n⟩ → cos(θ√(n+1))|e,n⟩ + sin(θ√(n+1))|g,n+1⟩
                    let w = theta * ((n + 1) as f64).sqrt();
                    let up = w.sin() * a;
                    if (n + 1) as usize > self.n_max {
                        leak += up.norm_sqr();
                    } else {
                        let mut g = ex.clone();
                        g.remove(pos);
                        add(&mut out, (n + 1, g), up);
                    }
                    add(&mut out, (n, ex), w.cos() * a);
                }
            }
        }
        self.amps = out;
        leak
    }
}

/// Pass the state through every atom of the chain in the given order.
pub fn chain_propagate(state: &FockChainState, model: &ChainModel, direction: ChainDirection) -> Result<FockChainState> {
    model.validate()?;
    if state.atoms != model.atoms {
        return Err(Error::InvalidParameter(format!(
            "state has {} atoms, model {}",
            state.atoms, model.atoms
        )));
    }
    let theta = model.kappa_tau();
    let mut s = state.clone();
    let mut leak = 0.0;
    let n = model.atoms as u32;
    let order: Box<dyn Iterator<Item = u32>> = match direction {
        ChainDirection::Forward => Box::new(0..n),
        ChainDirection::Backward => Box::new((0..n).rev()),
    };
    for j in order {
        leak += s.apply_atom(j, theta);
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max: s.n_max });
        }
    }
    Ok(s)
}

/// Storage-and-retrieval probability of a single photon in the chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainEfficiency {
    pub direction: ChainDirection,
    /// From the propagated state vector.
    pub exact: f64,
    /// Finite-N closed form: `N²s⁴c^{2N−2}` forward, `(1−c^{2N})²` backward.
    pub closed_form: f64,
    /// Large-N limit: `d²e^{−d}` forward, `(1−e^{−d})²` backward.
    pub limit: f64,
    /// Probability that the photon is absorbed at all, `1 − c^{2N}`.
    pub absorption: f64,
    /// Large-N absorption, `1 − e^{−d}`.
    pub absorption_limit: f64,
}

/// Absorb a photon in the forward direction, keep the branch where it was
/// absorbed, then let the chain re-emit in `direction` and project onto one
/// photon with every atom back in `|g⟩`.
pub fn chain_efficiency(model: &ChainModel, direction: ChainDirection) -> Result<ChainEfficiency> {
    model.validate()?;
    let n = model.atoms;
    let input = FockChainState::ground(n, 1, 1)?;
    let absorbed = chain_propagate(&input, model, ChainDirection::Forward)?.project_photons(0);
    let emitted = chain_propagate(&absorbed, model, direction)?;
    let exact = emitted.amplitude(1, &[]).norm_sqr();

    let (s, c) = model.kappa_tau().sin_cos();
    let c2n = c.powi(2 * n as i32);
    let d = model.d;
    let (closed_form, limit) = match direction {
        ChainDirection::Forward => ((n * n) as f64 * s.powi(4) * c.powi(2 * n as i32 - 2), d * d * (-d).exp()),
        ChainDirection::Backward => ((1.0 - c2n).powi(2), (1.0 - (-d).exp()).powi(2)),
    };
    Ok(ChainEfficiency {
        direction,
        exact,
        closed_form,
        limit,
        absorption: absorbed.norm_sqr(),
        absorption_limit: 1.0 - (-d).exp(),
    })
}

/// Photon-number distribution of the mode after passing the chain, with every
/// atom prepared in `|e⟩` (`inverted`) or `|g⟩`. Each atom meets the mode once,
/// so tracing it out right after its interaction is exact; the mode stays
/// diagonal in the Fock basis.
pub fn chain_photon_statistics(model: &ChainModel, inverted: bool, input: &[f64], n_max: usize) -> Result<Vec<f64>> {
    model.validate()?;
    if input.len() > n_max + 1 {
        return Err(Error::InvalidParameter("input distribution exceeds n_max".into()));
    }
    let theta = model.kappa_tau();
    let mut p = vec![0.0; n_max + 1];
    p[..input.len()].copy_from_slice(input);
    let mut leak = 0.0;
    for _ in 0..model.atoms {
        let mut next = vec![0.0; n_max + 1];
        for (n, &pn) in p.iter().enumerate() {
            if pn == 0.0 {
                continue;
            }
            if inverted {
                let up = (theta * ((n + 1) as f64).sqrt()).sin().powi(2);
                next[n] += pn * (1.0 - up);
                if n < n_max {
                    next[n + 1] += pn * up;
                } else {
                    leak += pn * up;
                }
            } else {
                let down = (theta * (n as f64).sqrt()).sin().powi(2);
                next[n] += pn * (1.0 - down);
                if n > 0 {
                    next[n - 1] += pn * down;
                }
            }
        }
        p = next;
        if leak > LEAK_TOLERANCE {
            return Err(Error::TruncationOverflow { leak, n_max });
        }
    }
    Ok(p)
}

/// Light emitted into the mode by a fully inverted chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvertedEmission {
    /// Large-N amplifier value `e^d − 1`.
    pub limit: f64,
    /// Bosonic (undepleted-inversion) finite-N value `cosh^{2N}(κτ) − 1`.
    pub bosonic: f64,
    /// Exact ⟨a†a⟩ of the chain, including depletion of the inversion.
    pub exact: f64,
}

/// Mean photon number emitted by an inverted ensemble: `e^d − 1`.
pub fn inverted_emission(model: &ChainModel) -> Result<f64> {
    model.validate()?;
    Ok(model.d.exp_m1())
}

/// [`inverted_emission`] together with the finite-N bosonic and exact values.
pub fn inverted_emission_exact(model: &ChainModel, n_max: usize) -> Result<InvertedEmission> {
    let p = chain_photon_statistics(model, true, &[1.0], n_max)?;
    let exact = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
    Ok(InvertedEmission {
        limit: inverted_emission(model)?,
        bosonic: model.kappa_tau().cosh().powi(2 * model.atoms as i32) - 1.0,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_fixed() {
        let m = ChainModel::new(7, 1.3).unwrap();
        let s = FockChainState::ground(7, 0, 3).unwrap();
        let out = chain_propagate(&s, &m, ChainDirection::Forward).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn single_atom_transforms() {
        let m = ChainModel::new(1, 0.49).unwrap();
        let (s, c) = 0.7f64.sin_cos();
        let g1 = chain_propagate(&FockChainState::ground(1, 1, 2).unwrap(), &m, ChainDirection::Forward).unwrap();
        assert!((g1.amplitude(1, &[]) - c).norm() < 1e-15);
        assert!((g1.amplitude(0, &[0]) + s).norm() < 1e-15);
        let e0 = chain_propagate(&FockChainState::basis(1, 0, vec![0], 2).unwrap(), &m, ChainDirection::Forward).unwrap();
        assert!((e0.amplitude(0, &[0]) - c).norm() < 1e-15);
        assert!((e0.amplitude(1, &[]) - s).norm() < 1e-15);
    }

    #[test]
    fn absorption_probability_closed_form() {
        let m = ChainModel::new(100, 2.0).unwrap();
        let e = chain_efficiency(&m, ChainDirection::Forward).unwrap();
        let c = m.kappa_tau().cos();
        assert!((e.absorption - (1.0 - c.powi(200))).abs() < 1e-13);
        assert!((e.absorption - (1.0 - (-2.0f64).exp())).abs() < 0.01);
    }

    #[test]
    fn efficiencies_match_finite_n_closed_forms() {
        for &(n, d) in &[(10, 0.5), (50, 2.0), (200, 2.0)] {
            let m = ChainModel::new(n, d).unwrap();
            for dir in [ChainDirection::Forward, ChainDirection::Backward] {
                let e = chain_efficiency(&m, dir).unwrap();
                assert!((e.exact - e.closed_form).abs() < 1e-12, "{n} {d} {dir:?}: {} vs {}", e.exact, e.closed_form);
            }
        }
    }

    #[test]
    fn zero_depth_stores_nothing() {
        let m = ChainModel::new(20, 0.0).unwrap();
        for dir in [ChainDirection::Forward, ChainDirection::Backward] {
            assert_eq!(chain_efficiency(&m, dir).unwrap().exact, 0.0);
        }
        assert_eq!(inverted_emission(&m).unwrap(), 0.0);
    }

    #[test]
    fn excitation_is_conserved() {
        let m = ChainModel::new(6, 1.5).unwrap();
        let s = FockChainState::inverted(6, 8).unwrap();
        let out = chain_propagate(&s, &m, ChainDirection::Backward).unwrap();
        let sectors = out.excitation_sectors();
        assert_eq!(sectors.len(), 1);
        assert!((sectors[&6] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn traced_statistics_match_state_vector() {
        let m = ChainModel::new(8, 1.0).unwrap();
        let full = chain_propagate(&FockChainState::inverted(8, 8).unwrap(), &m, ChainDirection::Forward).unwrap();
        let p = chain_photon_statistics(&m, true, &[1.0], 8).unwrap();
        let mean: f64 = p.iter().enumerate().map(|(n, q)| n as f64 * q).sum();
        assert!((mean - full.mean_photons()).abs() < 1e-12);
    }

    #[test]
    fn truncation_overflow_is_reported() {
        let m = ChainModel::new(10, 3.0).unwrap();
        assert!(matches!(
            chain_photon_statistics(&m, true, &[1.0], 2),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn coarse_chain_warns() {
        assert!(ChainModel::new(4, 1.0).unwrap().warnings().len() == 1);
        assert!(ChainModel::new(100, 1.0).unwrap().warnings().is_empty());
    }
}
