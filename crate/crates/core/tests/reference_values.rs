//! Cross-implementation check: the wavelet transform, phase estimates and
//! squeezed matrix of a fixed two-tone mixture are compared against values
//! computed by an independent NumPy realization of the same discrete
//! formulas. Guards against convention drift (normalization, frequency
//! signs, grid construction) that same-codebase tests cannot see.

use sstedr::cwt::{cwt, cwt_spectral_derivative, WaveletSpec};
use sstedr::signal::{to_dyadic, UniformSignal};
use sstedr::sst::{make_freq_grid, phase_transform, squeeze};

const TAU: f64 = std::f64::consts::TAU;

#[test]
fn transform_matches_independent_reference() {
    let n = 64usize;
    let dt = 1.0;
    let samples: Vec<f64> = (0..n)
        .map(|m| {
            let t = m as f64 * dt;
            (TAU * 0.11 * t).sin() + 0.5 * (TAU * 0.23 * t + 1.0).sin()
        })
        .collect();
    let sig = to_dyadic(&UniformSignal::new(samples, dt, 0.0).unwrap());
    let spec = WaveletSpec::new(0.2).unwrap();
    let gamma = 1e-8;

    let w = cwt(&sig, &spec, 4).unwrap();
    let dw = cwt_spectral_derivative(&sig, &spec, 4).unwrap();
    let omega = phase_transform(&w, &dw, gamma).unwrap();
    let grid = make_freq_grid(n, 16, dt).unwrap();
    let s = squeeze(&w, &omega, &grid, gamma).unwrap();

    let close = |a: f64, b: f64, what: &str| {
        assert!(
            (a - b).abs() <= 1e-9 * b.abs().max(1.0),
            "{what}: {a} vs reference {b}"
        );
    };

    let sum_abs_w: f64 = (0..w.n_scales())
        .flat_map(|j| w.row(j).iter().map(|c| c.norm()))
        .sum();
    close(sum_abs_w, 3.213332979077e2, "total wavelet magnitude");
    close(w.at(7, 13).re, 3.625051623418e-1, "W[7,13] real");
    close(w.at(7, 13).im, -2.610734520370e-1, "W[7,13] imag");
    close(omega.at(12, 30), 1.099904034253e-1, "omega[12,30]");

    let sum_abs_s: f64 = (0..s.n_bins())
        .flat_map(|l| s.row(l).iter().map(|c| c.norm()))
        .sum();
    close(sum_abs_s, 2.077500191525e1, "total squeezed magnitude");

    let m0 = 20;
    let mut best = (0usize, 0.0f64);
    for l in 0..s.n_bins() {
        let mag = s.at(l, m0).norm();
        if mag > best.1 {
            best = (l, mag);
        }
    }
    assert_eq!(best.0, 8, "dominant bin of column 20");
    close(s.at(8, m0).re, 1.983776173774e-1, "S[8,20] real");
    close(s.at(8, m0).im, -6.481786615701e-2, "S[8,20] imag");
}
