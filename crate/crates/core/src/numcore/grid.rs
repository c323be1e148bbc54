use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Uniform time grid `t_j = t0 + j·dt`, `j = 0..n`, with `n` a power of two.
///
/// The paired angular-frequency grid has spacing `2π/(n·dt)` and is stored in
/// FFT order (non-negative frequencies first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        Ok(Self { t0, dt, n })
    }

    /// Smallest power-of-two grid with step `dt` starting at `start` and reaching `end`.
    pub fn covering(start: f64, end: f64, dt: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::InvalidParameter(format!("empty interval [{start}, {end}]")));
        }
        let needed = ((end - start) / dt).ceil() as usize + 1;
        Self::new(start, dt, needed.next_power_of_two().max(8))
    }

    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t(self.n - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.t(j)).collect()
    }

    /// Index of the sample nearest to `t`, clamped to the grid.
    pub fn index_of(&self, t: f64) -> usize {
        let x = ((t - self.t0) / self.dt).round();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.n - 1)
        }
    }

    /// First index whose time is `>= t` (may equal `n`).
    pub fn index_at_or_after(&self, t: f64) -> usize {
        let x = ((t - self.t0) / self.dt - 1e-9).ceil();
        if x <= 0.0 {
            0
        } else {
            (x as usize).min(self.n)
        }
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dt)
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.dt
    }

    /// Angular frequency of FFT bin `k`.
    pub fn omega(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 * self.d_omega()
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.omega(k)).collect()
    }
}
