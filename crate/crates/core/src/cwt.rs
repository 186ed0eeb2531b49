//! Continuous wavelet transform on a geometric scale grid, computed in the
//! frequency domain, together with its time derivative.
//!
//! The mother wavelet is specified by its Fourier transform, a bump centered
//! at frequency 1: `psi_hat(xi) = 2^(-((xi-1)/sigma)^2)` for positive `xi`,
//! zero otherwise. Each scale row is `ifft(fft(f) * psi_hat(a*xi) * sqrt(a))`
//! on the signal's discrete frequency grid.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal::DyadicSignal;

/// Width parameter of the frequency-domain wavelet bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletSpec {
    sigma: f64,
}

impl WaveletSpec {
    /// `sigma` must lie in (0, 1) so the bump is effectively supported on
    /// positive frequencies.
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "wavelet sigma must be in (0, 1), got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `psi_hat` evaluated at dimensionless frequency `xi`.
///
/// Hard-truncated to zero for `xi <= 0`: the bump value at 0 is
/// `2^(-(1/sigma)^2)` (about 1e-13 at sigma 0.15), and truncation makes the
/// wavelet genuinely admissible.
pub fn wavelet_hat(xi: f64, spec: &WaveletSpec) -> f64 {
    if xi <= 0.0 {
        0.0
    } else {
        (-((xi - 1.0) / spec.sigma).powi(2)).exp2()
    }
}

/// The dyadic scale grid `a_j = 2^(j/n_v) * dt`, `j = 1..=L*n_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    scales: Vec<f64>,
    n_v: usize,
}

impl ScaleGrid {
    pub fn new(level: u32, n_v: usize, dt: f64) -> Result<Self> {
        if n_v < 1 {
            return Err(Error::InvalidArgument("voice count must be >= 1".into()));
        }
        let scales = (1..=level as usize * n_v)
            .map(|j| (j as f64 / n_v as f64).exp2() * dt)
            .collect();
        Ok(Self { scales, n_v })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn voices(&self) -> usize {
        self.n_v
    }
}

/// Complex wavelet coefficients, one row per scale.
#[derive(Debug, Clone)]
pub struct CwtMatrix {
    values: Vec<Complex64>,
    n_times: usize,
    grid: ScaleGrid,
    dt: f64,
    t0: f64,
}

impl CwtMatrix {
    pub fn n_scales(&self) -> usize {
        self.grid.len()
    }

    pub fn n_times(&self) -> usize {
        self.n_times
    }

    pub fn grid(&self) -> &ScaleGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn at(&self, scale_idx: usize, time_idx: usize) -> Complex64 {
        self.values[scale_idx * self.n_times + time_idx]
    }

    pub fn row(&self, scale_idx: usize) -> &[Complex64] {
        &self.values[scale_idx * self.n_times..(scale_idx + 1) * self.n_times]
    }
}

enum SpectralWeight {
    Plain,
    /// Multiply by `i*2*pi*nu`, yielding the exact time derivative of the
    /// periodic extension.
    Derivative,
}

fn cwt_impl(
    sig: &DyadicSignal,
    spec: &WaveletSpec,
    n_v: usize,
    weight: SpectralWeight,
) -> Result<CwtMatrix> {
    if n_v < 1 {
        return Err(Error::InvalidArgument("voice count must be >= 1".into()));
    }
    let inner = sig.inner();
    let n = inner.len();
    let dt = inner.dt();
    let grid = ScaleGrid::new(sig.level(), n_v, dt)?;

    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut spectrum: Vec<Complex64> = inner
        .samples()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    fwd.process(&mut spectrum);

    // Signed DFT frequencies in Hz; bins above n/2 are negative and never
    // contribute because psi_hat vanishes there.
    let freq = |k: usize| -> f64 {
        let signed = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        signed / (n as f64 * dt)
    };

    let mut values = vec![Complex64::new(0.0, 0.0); grid.len() * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, &a) in grid.scales().iter().enumerate() {
        let root_a = a.sqrt();
        for k in 0..n {
            let nu = freq(k);
            let h = wavelet_hat(a * nu, spec) * root_a;
            if h == 0.0 {
                buf[k] = Complex64::new(0.0, 0.0);
                continue;
            }
            let w = match weight {
                SpectralWeight::Plain => Complex64::new(h, 0.0),
                SpectralWeight::Derivative => {
                    Complex64::new(0.0, 2.0 * std::f64::consts::PI * nu * h)
                }
            };
            buf[k] = spectrum[k] * w;
        }
        inv.process(&mut buf);
        let norm = 1.0 / n as f64;
        for (dst, src) in values[j * n..(j + 1) * n].iter_mut().zip(buf.iter()) {
            *dst = src * norm;
        }
    }

    Ok(CwtMatrix {
        values,
        n_times: n,
        grid,
        dt,
        t0: inner.t0(),
    })
}

/// Continuous wavelet transform of `sig`, shape `(L * n_v) x n`.
pub fn cwt(sig: &DyadicSignal, spec: &WaveletSpec, n_v: usize) -> Result<CwtMatrix> {
    cwt_impl(sig, spec, n_v, SpectralWeight::Plain)
}

/// Time derivative of the CWT via central finite differences, one-sided at
/// the two temporal edges.
pub fn cwt_time_derivative(
    sig: &DyadicSignal,
    spec: &WaveletSpec,
    n_v: usize,
) -> Result<CwtMatrix> {
    let w = cwt(sig, spec, n_v)?;
    Ok(finite_difference_time(&w))
}

/// Time derivative of the CWT computed spectrally (multiplication by
/// `i*2*pi*nu` before inversion). Exact for the periodic extension, free of
/// the `sin(2*pi*f*dt)/(2*pi*f*dt)` bias that finite differences carry at
/// coarse sampling; the analysis pipelines use this variant.
pub fn cwt_spectral_derivative(
    sig: &DyadicSignal,
    spec: &WaveletSpec,
    n_v: usize,
) -> Result<CwtMatrix> {
    cwt_impl(sig, spec, n_v, SpectralWeight::Derivative)
}

fn finite_difference_time(w: &CwtMatrix) -> CwtMatrix {
    let n = w.n_times;
    let dt = w.dt;
    let mut values = vec![Complex64::new(0.0, 0.0); w.values.len()];
    for j in 0..w.n_scales() {
        let row = w.row(j);
        let out = &mut values[j * n..(j + 1) * n];
        if n >= 2 {
            out[0] = (row[1] - row[0]) / dt;
            out[n - 1] = (row[n - 1] - row[n - 2]) / dt;
        }
        for m in 1..n.saturating_sub(1) {
            out[m] = (row[m + 1] - row[m - 1]) / (2.0 * dt);
        }
    }
    CwtMatrix {
        values,
        n_times: n,
        grid: w.grid.clone(),
        dt,
        t0: w.t0,
    }
}
