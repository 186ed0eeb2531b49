//! Phase transform and synchrosqueezing: reassign wavelet energy onto a
//! log-spaced frequency grid.

use num_complex::Complex64;

use crate::cwt::CwtMatrix;
use crate::error::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Per-cell instantaneous-frequency estimates in Hz. Cells whose wavelet
/// magnitude fell at or below the threshold hold `f64::INFINITY`.
#[derive(Debug, Clone)]
pub struct PhaseMatrix {
    values: Vec<f64>,
    n_scales: usize,
    n_times: usize,
}

impl PhaseMatrix {
    pub fn n_scales(&self) -> usize {
        self.n_scales
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn at(&self, scale_idx: usize, time_idx: usize) -> f64 {
        self.values[scale_idx * self.n_times + time_idx]
    }

    /// True where the cell was below the magnitude threshold.
    pub fn is_excluded(&self, scale_idx: usize, time_idx: usize) -> bool {
        !self.at(scale_idx, time_idx).is_finite()
    }
}

/// Geometric frequency grid from `1/(n*dt)` up to the Nyquist `1/(2*dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    xi: Vec<f64>,
    delta_xi: f64,
    xi_min: f64,
}

impl FreqGrid {
    pub fn values(&self) -> &[f64] {
        &self.xi
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// Log2 spacing between adjacent bins, in octaves.
    pub fn delta_xi(&self) -> f64 {
        self.delta_xi
    }

    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    pub fn xi_max(&self) -> f64 {
        *self.xi.last().unwrap()
    }

    /// Nearest bin in log frequency, or `None` when the rounded bin falls
    /// outside the grid. Only defined for positive frequencies.
    pub fn bin_of(&self, freq_hz: f64) -> Option<usize> {
        if !(freq_hz > 0.0) || !freq_hz.is_finite() {
            return None;
        }
        let raw = ((freq_hz / self.xi_min).log2() / self.delta_xi).round();
        if raw < 0.0 || raw >= self.xi.len() as f64 {
            None
        } else {
            Some(raw as usize)
        }
    }
}

/// Build the grid for a record of `n` samples at interval `dt`:
/// `xi_l = 2^((l-1)*delta_xi) * xi_min` with
/// `delta_xi = log2(n/2) / (n_xi - 1)`.
pub fn make_freq_grid(n: usize, n_xi: usize, dt: f64) -> Result<FreqGrid> {
    if !n.is_power_of_two() || n < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid length must be a power of two >= 4, got {n}"
        )));
    }
    if n_xi < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 frequency bins, got {n_xi}"
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample interval must be positive, got {dt}"
        )));
    }
    let xi_min = 1.0 / (n as f64 * dt);
    let delta_xi = (n as f64 / 2.0).log2() / (n_xi - 1) as f64;
    let xi = (0..n_xi)
        .map(|i| (i as f64 * delta_xi).exp2() * xi_min)
        .collect();
    Ok(FreqGrid {
        xi,
        delta_xi,
        xi_min,
    })
}

/// Squeezed time-frequency energy, one row per frequency bin.
#[derive(Debug, Clone)]
pub struct SstMatrix {
    values: Vec<Complex64>,
    n_times: usize,
    grid: FreqGrid,
    dt: f64,
    t0: f64,
}

impl SstMatrix {
    /// Assemble a matrix from raw row-major values (bin-major) — used when
    /// reloading a stored matrix or constructing fixtures.
    pub fn from_parts(values: Vec<Complex64>, grid: FreqGrid, dt: f64, t0: f64) -> Result<Self> {
        if grid.is_empty() || values.len() % grid.len() != 0 {
            return Err(Error::InvalidArgument(format!(
                "value count {} is not a multiple of the bin count {}",
                values.len(),
                grid.len()
            )));
        }
        let n_times = values.len() / grid.len();
        Ok(Self {
            values,
            n_times,
            grid,
            dt,
            t0,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.grid.len()
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the first column.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn at(&self, bin_idx: usize, time_idx: usize) -> Complex64 {
        self.values[bin_idx * self.n_times + time_idx]
    }

    pub fn row(&self, bin_idx: usize) -> &[Complex64] {
        &self.values[bin_idx * self.n_times..(bin_idx + 1) * self.n_times]
    }

    /// Keep columns `[start, start+len)`.
    pub fn crop_time(&self, start: usize, len: usize) -> Result<SstMatrix> {
        if start + len > self.n_times {
            return Err(Error::InvalidArgument(format!(
                "crop [{start}, {}) out of range for {} columns",
                start + len,
                self.n_times
            )));
        }
        let mut values = Vec::with_capacity(self.n_bins() * len);
        for b in 0..self.n_bins() {
            values.extend_from_slice(&self.row(b)[start..start + len]);
        }
        Ok(SstMatrix {
            values,
            n_times: len,
            grid: self.grid.clone(),
            dt: self.dt,
            t0: self.t0 + start as f64 * self.dt,
        })
    }
}

/// Instantaneous-frequency estimate per cell: the real part of
/// `-(i/2pi) * dW/W` where `|W| > gamma`, `INFINITY` elsewhere.
pub fn phase_transform(w: &CwtMatrix, dw: &CwtMatrix, gamma: f64) -> Result<PhaseMatrix> {
    if w.n_scales() != dw.n_scales() || w.n_times() != dw.n_times() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: {}x{} vs {}x{}",
            w.n_scales(),
            w.n_times(),
            dw.n_scales(),
            dw.n_times()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be positive, got {gamma}"
        )));
    }
    let n_scales = w.n_scales();
    let n_times = w.n_times();
    let mut values = vec![f64::INFINITY; n_scales * n_times];
    for j in 0..n_scales {
        let wr = w.row(j);
        let dr = dw.row(j);
        let out = &mut values[j * n_times..(j + 1) * n_times];
        for m in 0..n_times {
            let norm_sqr = wr[m].norm_sqr();
            if norm_sqr > gamma * gamma {
                // Re(-(i/2pi) * d/w) = Im(d * conj(w)) / (2pi |w|^2)
                let im = dr[m].im * wr[m].re - dr[m].re * wr[m].im;
                out[m] = im / (TAU * norm_sqr);
            }
        }
    }
    Ok(PhaseMatrix {
        values,
        n_scales,
        n_times,
    })
}

/// Reassign wavelet coefficients onto the frequency grid:
/// `S(l, m) = sum over j in B(l, m) of (ln 2 / n_v) * W(j, m) * a_j^(-1/2)`
/// where `B(l, m)` collects the cells whose magnitude exceeds `gamma`, whose
/// frequency estimate is positive, and whose nearest log-frequency bin is
/// `l`. Estimates rounding outside the grid are dropped.
pub fn squeeze(
    w: &CwtMatrix,
    omega: &PhaseMatrix,
    grid: &FreqGrid,
    gamma: f64,
) -> Result<SstMatrix> {
    if w.n_scales() != omega.n_scales() || w.n_times() != omega.n_times() {
        return Err(Error::InvalidArgument(format!(
            "shape mismatch: {}x{} vs {}x{}",
            w.n_scales(),
            w.n_times(),
            omega.n_scales(),
            omega.n_times()
        )));
    }
    let n_times = w.n_times();
    let n_bins = grid.len();
    let ln2_over_nv = std::f64::consts::LN_2 / w.grid().voices() as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); n_bins * n_times];
    for j in 0..w.n_scales() {
        let coef = ln2_over_nv / w.grid().scales()[j].sqrt();
        let wr = w.row(j);
        for m in 0..n_times {
            if wr[m].norm() <= gamma {
                continue;
            }
            let est = omega.at(j, m);
            if let Some(l) = grid.bin_of(est) {
                values[l * n_times + m] += wr[m] * coef;
            }
        }
    }
    Ok(SstMatrix {
        values,
        n_times,
        grid: grid.clone(),
        dt: w.dt(),
        t0: w.t0(),
    })
}
