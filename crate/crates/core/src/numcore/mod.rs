//! Shared numerical substrate: grids, envelopes, pulse shapes, Fourier
//! transforms, detuning distributions, transfer functions and the
//! Maxwell–Bloch slice marcher used by the two- and three-level solvers.

mod bessel;
mod distribution;
mod envelope;
mod fourier;
mod grid;
pub(crate) mod march;
mod pulse;
pub(crate) mod transfer;

pub use bessel::bessel_j1;
pub use distribution::{DetuningClass, DetuningDistribution, DistributionKind};
pub use envelope::ComplexEnvelope;
pub use fourier::{forward_transform, inverse_transform, spectral_extent, Spectrum};
pub use grid::TimeGrid;
pub use march::{SliceDiagnostics, ZScheme};
pub use pulse::{PulseKind, PulseShape};
pub use transfer::{
    apply_transfer, eit_width, light_shift, lorentzian_impulse_response, raman_width,
    shaded_area_efficiency, TransferFunction, TransferKind,
};
