//! Uniformly sampled time series and the conditioning steps shared by all
//! analysis stages: running-median detrending, reflecting-boundary padding,
//! linear resampling and dyadic-length truncation.

use crate::error::{Error, Result};

/// A real-valued, uniformly sampled time series.
///
/// Sample `m` corresponds to time `t0 + m * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal {
    samples: Vec<f64>,
    dt: f64,
    t0: f64,
}

impl UniformSignal {
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sample interval must be positive, got {dt}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        Ok(Self { samples, dt, t0 })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Time of sample `m`.
    pub fn time_at(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    /// Index of the sample nearest to time `t`, clamped to the record.
    pub fn index_at(&self, t: f64) -> usize {
        let raw = ((t - self.t0) / self.dt).round();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.samples.len() - 1)
        }
    }

    /// Keep `len` samples starting at `start`, adjusting the time origin.
    pub fn crop(&self, start: usize, len: usize) -> Result<UniformSignal> {
        if start + len > self.samples.len() || len < 2 {
            return Err(Error::InvalidArgument(format!(
                "crop [{start}, {}) out of range for length {}",
                start + len,
                self.samples.len()
            )));
        }
        UniformSignal::new(
            self.samples[start..start + len].to_vec(),
            self.dt,
            self.time_at(start),
        )
    }
}

/// A signal whose length is an exact power of two, `2^(L+1)`.
#[derive(Debug, Clone)]
pub struct DyadicSignal {
    inner: UniformSignal,
    level: u32,
}

impl DyadicSignal {
    pub fn inner(&self) -> &UniformSignal {
        &self.inner
    }

    /// The nonnegative integer `L` with `len == 2^(L+1)`.
    pub fn level(&self) -> u32 {
        self.level
    }
}

/// Subtract a running-median baseline estimate from the signal.
///
/// The window is `round(window_s / dt)` samples, shrunk symmetrically at the
/// record edges rather than padded. Even-size windows use the lower median.
pub fn median_detrend(sig: &UniformSignal, window_s: f64) -> Result<UniformSignal> {
    if !(window_s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "detrend window must be positive, got {window_s}"
        )));
    }
    let w = ((window_s / sig.dt()).round() as usize).max(1);
    if w > sig.len() {
        return Err(Error::InvalidArgument(format!(
            "detrend window of {w} samples exceeds signal length {}",
            sig.len()
        )));
    }
    let baseline = running_median(sig.samples(), w);
    let detrended = sig
        .samples()
        .iter()
        .zip(baseline.iter())
        .map(|(x, b)| x - b)
        .collect();
    UniformSignal::new(detrended, sig.dt(), sig.t0())
}

/// Running median with a clamped (shrunken) window at the edges.
///
/// Maintains a sorted window; insertion and removal are O(w) memmoves, which
/// beats heap bookkeeping for the window sizes used here (tens to hundreds).
fn running_median(x: &[f64], w: usize) -> Vec<f64> {
    let n = x.len();
    let half_left = (w - 1) / 2;
    let half_right = w / 2;
    let mut window: Vec<f64> = Vec::with_capacity(w + 1);
    let mut lo = 0usize; // current window = x[lo..hi]
    let mut hi = 0usize;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let new_lo = i.saturating_sub(half_left);
        let new_hi = (i + half_right + 1).min(n);
        while hi < new_hi {
            let v = x[hi];
            let pos = window.partition_point(|&y| y < v);
            window.insert(pos, v);
            hi += 1;
        }
        while lo < new_lo {
            let v = x[lo];
            let pos = window.partition_point(|&y| y < v);
            // pos indexes the first element >= v, which must equal v
            window.remove(pos);
            lo += 1;
        }
        // lower median for even window sizes
        out.push(window[(window.len() - 1) / 2]);
    }
    out
}

/// Extend the signal on both sides by mirroring interior samples (the edge
/// sample itself is not repeated). `t0` shifts left by `n_pad * dt`.
pub fn reflect_pad(sig: &UniformSignal, n_pad: usize) -> Result<UniformSignal> {
    let n = sig.len();
    if n_pad == 0 || n_pad >= n {
        return Err(Error::InvalidArgument(format!(
            "pad length must satisfy 1 <= n_pad < {n}, got {n_pad}"
        )));
    }
    let x = sig.samples();
    let mut out = Vec::with_capacity(n + 2 * n_pad);
    for i in (1..=n_pad).rev() {
        out.push(x[i]);
    }
    out.extend_from_slice(x);
    for i in 1..=n_pad {
        out.push(x[n - 1 - i]);
    }
    UniformSignal::new(out, sig.dt(), sig.t0() - n_pad as f64 * sig.dt())
}

/// Linear interpolation onto a new uniform grid covering the same time span,
/// keeping the first sample time. `new_dt == dt` is the exact identity.
pub fn resample(sig: &UniformSignal, new_dt: f64) -> Result<UniformSignal> {
    if !(new_dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resample interval must be positive, got {new_dt}"
        )));
    }
    if new_dt == sig.dt() {
        return Ok(sig.clone());
    }
    let n = sig.len();
    let span = (n - 1) as f64 * sig.dt();
    let m = (span / new_dt + 1e-9).floor() as usize + 1;
    let x = sig.samples();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let pos = k as f64 * new_dt / sig.dt();
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        out.push(x[i] * (1.0 - frac) + x[i + 1] * frac);
    }
    UniformSignal::new(out, new_dt, sig.t0())
}

/// Truncate to the largest `2^(L+1) <= len`, keeping the earliest samples.
pub fn to_dyadic(sig: &UniformSignal) -> DyadicSignal {
    let n = sig.len();
    // largest power of two <= n; len >= 2 is guaranteed by the constructor
    let kept = 1usize << (usize::BITS - 1 - n.leading_zeros());
    let level = kept.trailing_zeros() - 1;
    let inner = if kept == n {
        sig.clone()
    } else {
        sig.crop(0, kept).expect("kept <= n")
    };
    DyadicSignal { inner, level }
}
