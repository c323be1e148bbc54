use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{ComplexEnvelope, TimeGrid};
use crate::C64;

/// Spectral samples `f̃(ω_k)` on the frequency grid paired with `grid`, FFT order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: TimeGrid,
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn omega(&self, k: usize) -> f64 {
        self.grid.omega(k)
    }

    /// `(1/2π)∫|f̃|² dω`, equal to the time-domain energy by Parseval.
    pub fn energy(&self) -> f64 {
        let dw = self.grid.d_omega();
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dw / (2.0 * std::f64::consts::PI)
    }
}

/// `f̃(ω) = ∫f(t)e^{−iωt}dt`, discretised as `dt·e^{−iω_k t0}·Σ_j f_j e^{−2πijk/n}`.
pub fn forward_transform(env: &ComplexEnvelope) -> Spectrum {
    let grid = env.grid;
    let mut buf = env.samples.clone();
    FftPlanner::new().plan_fft_forward(grid.n).process(&mut buf);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= C64::from_polar(grid.dt, -grid.omega(k) * grid.t0);
    }
    Spectrum { grid, values: buf }
}

/// `f(t) = (1/2π)∫f̃(ω)e^{iωt}dω`, the exact inverse of [`forward_transform`].
pub fn inverse_transform(spec: &Spectrum) -> ComplexEnvelope {
    let grid = spec.grid;
    let scale = 1.0 / (grid.n as f64 * grid.dt);
    let mut buf: Vec<C64> = spec
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * C64::from_polar(scale, grid.omega(k) * grid.t0))
        .collect();
    FftPlanner::new().plan_fft_inverse(grid.n).process(&mut buf);
    ComplexEnvelope { grid, samples: buf }
}

/// Angular frequency beyond which `env` carries less than `fraction` of its energy.
pub fn spectral_extent(env: &ComplexEnvelope, fraction: f64) -> f64 {
    let spec = forward_transform(env);
    let mut bins: Vec<(f64, f64)> =
        spec.values.iter().enumerate().map(|(k, v)| (spec.grid.omega(k).abs(), v.norm_sqr())).collect();
    bins.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = bins.iter().map(|b| b.1).sum();
    let mut outside = 0.0;
    for (w, e) in bins {
        outside += e;
        if outside > fraction * total {
            return w;
        }
    }
    0.0
}
