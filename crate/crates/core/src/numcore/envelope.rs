use serde::{Deserialize, Serialize};

use super::TimeGrid;
use crate::{Error, Result, C64};

/// Complex field envelope sampled on a [`TimeGrid`], in Rabi-frequency units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexEnvelope {
    pub grid: TimeGrid,
    pub samples: Vec<C64>,
}

impl ComplexEnvelope {
    pub fn new(grid: TimeGrid, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::InvalidParameter(format!(
                "{} samples for a grid of {}",
                samples.len(),
                grid.n
            )));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self { grid, samples: vec![C64::new(0.0, 0.0); grid.n] }
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Self {
        let samples = (0..grid.n).map(|j| f(grid.t(j))).collect();
        Self { grid, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|e| e.norm_sqr()).collect()
    }

    /// `Σ|E|²·dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|e| e.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    /// Energy over samples with `t >= cut`.
    pub fn energy_after(&self, cut: f64) -> f64 {
        let j0 = self.grid.index_at_or_after(cut);
        self.samples[j0..].iter().map(|e| e.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    /// Energy over samples with `start <= t <= end`.
    pub fn energy_between(&self, start: f64, end: f64) -> f64 {
        let j0 = self.grid.index_at_or_after(start);
        let j1 = self.grid.index_at_or_after(end + 1e-9 * self.grid.dt).min(self.len());
        if j1 <= j0 {
            return 0.0;
        }
        self.samples[j0..j1].iter().map(|e| e.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    /// Complex area `∫E dt`.
    pub fn area(&self) -> C64 {
        self.samples.iter().sum::<C64>() * self.grid.dt
    }

    /// `∫|E| dt`.
    pub fn abs_area(&self) -> f64 {
        self.samples.iter().map(|e| e.norm()).sum::<f64>() * self.grid.dt
    }

    /// Intensity-weighted mean time.
    pub fn centroid(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, e) in self.samples.iter().enumerate() {
            let w = e.norm_sqr();
            num += w * self.grid.t(j);
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            f64::NAN
        }
    }

    /// Intensity-weighted mean time restricted to `[start, end]`.
    pub fn centroid_between(&self, start: f64, end: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, e) in self.samples.iter().enumerate() {
            let t = self.grid.t(j);
            if t >= start && t <= end {
                let w = e.norm_sqr();
                num += w * t;
                den += w;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            f64::NAN
        }
    }

    /// Time of the intensity maximum, refined by a parabola through the three
    /// samples around the peak.
    pub fn peak_time(&self) -> f64 {
        let inten = self.intensity();
        let (jm, _) = inten
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        if jm == 0 || jm + 1 >= inten.len() {
            return self.grid.t(jm);
        }
        let (a, b, c) = (inten[jm - 1], inten[jm], inten[jm + 1]);
        let denom = a - 2.0 * b + c;
        let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
        self.grid.t(jm) + shift * self.grid.dt
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.samples.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { grid: self.grid, samples: self.samples.iter().map(|e| e * s).collect() }
    }

    pub fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Self { grid: self.grid, samples }
    }

    pub fn minus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Self { grid: self.grid, samples }
    }

    /// Copy with samples outside `[start, end]` set to zero.
    pub fn windowed(&self, start: f64, end: f64) -> Self {
        let grid = self.grid;
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(j, &e)| {
                let t = grid.t(j);
                if t >= start && t <= end {
                    e
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        Self { grid, samples }
    }

    /// Largest edge amplitude (first/last `guard` samples) relative to the peak.
    pub fn edge_ratio(&self, guard: usize) -> f64 {
        let peak = self.peak_amplitude();
        if peak == 0.0 {
            return 0.0;
        }
        let g = guard.min(self.len() / 2);
        let head = self.samples[..g].iter().map(|e| e.norm());
        let tail = self.samples[self.len() - g..].iter().map(|e| e.norm());
        head.chain(tail).fold(0.0, f64::max) / peak
    }
}
