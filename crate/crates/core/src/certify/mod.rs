//! Quantum certification: the atomic-chain toy model, the continuous-variable
//! T–V criterion and photon-counting criteria, with truncated Fock-space tools
//! to evaluate detector POVMs directly.

mod chain;
mod counting;
pub mod fock;
mod tv;

pub use chain::{
    chain_efficiency, chain_photon_statistics, chain_propagate, inverted_emission, inverted_emission_exact,
    ChainDirection, ChainEfficiency, ChainModel, FockChainState, InvertedEmission, COUPLING_WARNING,
};
pub use counting::{
    bell_visibility, cauchy_schwarz, click_probability_2pe, g2_2pe, g2_2pe_with, g2_memory, mean_photon_number,
    pair_parameter, Conditioning, Criterion, CriterionInputs, CriterionReport, DetectorModel,
};
pub use fock::{povm_click, povm_joint_click, ClickDetector, FockMixture, FockState};
pub use tv::{slowlight_noise, tv_criterion, AmplifierModel, TvProtocol, FLAG_V_NOISE_AS_PRINTED};
