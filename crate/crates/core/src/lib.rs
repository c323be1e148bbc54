//! Semi-classical Maxwell–Bloch simulation of optical quantum memories.
//!
//! The crate covers photon-echo storage (two-pulse echo, CRIB, ROSE), slow-light
//! and stopped-light storage (spectral-hole, free-induction-decay, EIT and Raman
//! memories), and the certification side: an exact atomic-chain toy model,
//! continuous-variable T–V criteria and photon-counting criteria checked against
//! truncated Fock-space POVM evaluation.
//!
//! Units are dimensionless throughout: time in units of an inverse linewidth,
//! fields as Rabi frequencies, the medium length normalised to one so that the
//! optical depth `d` carries the absorption strength.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod echo;
pub mod error;
pub mod numcore;
pub mod scenario;
pub mod slowlight;
pub mod threelevel;
pub mod twolevel;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
