//! Band reconstruction of the oscillatory signal around the extracted ridge.

use num_complex::Complex64;

use crate::error::Result;
use crate::ridge::Ridge;
use crate::signal::UniformSignal;
use crate::sst::SstMatrix;

/// Complex column sums over the band `[c(m) - n_w, c(m) + n_w]`, clipped to
/// the grid. The modulus of this sum estimates the oscillation envelope.
pub fn band_sum(s: &SstMatrix, ridge: &Ridge, n_w: usize) -> Vec<Complex64> {
    let n_bins = s.n_bins();
    let mut out = Vec::with_capacity(s.n_times());
    for m in 0..s.n_times() {
        let c = ridge.bins()[m];
        let lo = c.saturating_sub(n_w);
        let hi = (c + n_w).min(n_bins - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in lo..=hi {
            acc += s.at(l, m);
        }
        out.push(acc);
    }
    out
}

/// Reconstruct the signal from the ridge band: the real part of the column
/// band sum, scaled by the calibration constant `kappa` (see
/// [`crate::pipeline::calibrate_kappa`]). Amplitude fidelity is only as good
/// as the calibration; the oscillatory pattern is the quantity of interest.
pub fn reconstruct_band(
    s: &SstMatrix,
    ridge: &Ridge,
    n_w: usize,
    kappa: f64,
) -> Result<UniformSignal> {
    let sums = band_sum(s, ridge, n_w);
    let samples = sums.iter().map(|c| kappa * c.re).collect();
    UniformSignal::new(samples, s.dt(), s.t0())
}
