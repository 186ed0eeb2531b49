//! Extraction of the dominant time-frequency curve by dynamic programming.
//!
//! The curve maximizes
//! `sum_m log(|S(c(m), m)| / q) - lambda * sum_m (c(m) - c(m-1))^2`
//! with `q` the total matrix mass. The DP is exact; per transition it scans
//! predecessor bins outward from the target bin and stops once the quadratic
//! penalty alone exceeds the best achievable improvement, which prunes
//! nothing that could still win or tie.

use crate::error::{Error, Result};
use crate::sst::{FreqGrid, SstMatrix};

/// The extracted curve: one frequency bin per time sample, with the bin's
/// grid frequency alongside. Bin indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    bins: Vec<usize>,
    freqs: Vec<f64>,
}

impl Ridge {
    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    /// Keep samples `[start, start+len)`.
    pub fn crop(&self, start: usize, len: usize) -> Result<Ridge> {
        if start + len > self.bins.len() {
            return Err(Error::InvalidArgument(format!(
                "crop [{start}, {}) out of range for ridge of length {}",
                start + len,
                self.bins.len()
            )));
        }
        Ok(Ridge {
            bins: self.bins[start..start + len].to_vec(),
            freqs: self.freqs[start..start + len].to_vec(),
        })
    }
}

/// Map ridge bins through a frequency grid.
pub fn ridge_to_if(ridge: &Ridge, grid: &FreqGrid) -> Vec<f64> {
    ridge.bins.iter().map(|&b| grid.values()[b]).collect()
}

/// Exact global maximizer of the penalized log-magnitude functional.
///
/// Ties break toward the lower bin index. Cells with zero magnitude score
/// negative infinity and are never chosen while any strictly positive path
/// exists.
pub fn extract_ridge(s: &SstMatrix, lambda: f64) -> Result<Ridge> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "smoothness penalty must be >= 0, got {lambda}"
        )));
    }
    let n_bins = s.n_bins();
    let n = s.n_times();
    let q: f64 = (0..n_bins)
        .map(|l| s.row(l).iter().map(|c| c.norm()).sum::<f64>())
        .sum();
    if q == 0.0 {
        return Err(Error::DegenerateInput(
            "all-zero time-frequency matrix".into(),
        ));
    }

    // local[l * n + m] = log(|S(l, m)| / q), -inf at zero cells
    let mut local = vec![f64::NEG_INFINITY; n_bins * n];
    for l in 0..n_bins {
        for (m, c) in s.row(l).iter().enumerate() {
            let mag = c.norm();
            if mag > 0.0 {
                local[l * n + m] = (mag / q).ln();
            }
        }
    }

    let penalty: Vec<f64> = (0..n_bins).map(|d| lambda * (d * d) as f64).collect();
    let mut prev: Vec<f64> = (0..n_bins).map(|l| local[l * n]).collect();
    let mut cur = vec![0.0f64; n_bins];
    let mut back = vec![0u32; n_bins * n];

    for m in 1..n {
        let prev_max = prev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lambda == 0.0 {
            // transitions are free: every bin chains to the same argmax
            let best_j = prev
                .iter()
                .enumerate()
                .find(|(_, &v)| v == prev_max)
                .map(|(j, _)| j)
                .unwrap_or(0);
            for l in 0..n_bins {
                cur[l] = local[l * n + m] + prev_max;
                back[l * n + m] = best_j as u32;
            }
        } else {
            for l in 0..n_bins {
                let mut best = f64::NEG_INFINITY;
                let mut best_j = usize::MAX;
                let mut d = 0usize;
                loop {
                    let mut visit = |j: usize| {
                        let v = prev[j] - penalty[d];
                        if v > best || (v == best && j < best_j) {
                            best = v;
                            best_j = j;
                        }
                    };
                    let left_ok = d <= l;
                    let right_ok = l + d < n_bins;
                    if left_ok {
                        visit(l - d);
                    }
                    if right_ok && d > 0 {
                        visit(l + d);
                    }
                    if !left_ok && !right_ok {
                        break;
                    }
                    // no farther bin can beat or tie the incumbent once the
                    // penalty gap exceeds its headroom against the column max
                    if d + 1 < n_bins && prev_max - penalty[d + 1] < best {
                        break;
                    }
                    if d + 1 >= n_bins {
                        break;
                    }
                    d += 1;
                }
                if best_j == usize::MAX {
                    best_j = 0;
                }
                cur[l] = local[l * n + m] + best;
                back[l * n + m] = best_j as u32;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    // lowest-index argmax of the final column, then backtrack
    let mut end = 0usize;
    let mut end_score = f64::NEG_INFINITY;
    for (l, &v) in prev.iter().enumerate() {
        if v > end_score {
            end_score = v;
            end = l;
        }
    }
    let mut bins = vec![0usize; n];
    bins[n - 1] = end;
    for m in (1..n).rev() {
        bins[m - 1] = back[bins[m] * n + m] as usize;
    }
    let freqs = bins.iter().map(|&b| s.grid().values()[b]).collect();
    Ok(Ridge { bins, freqs })
}

/// Objective value of a given curve under the same functional the extractor
/// maximizes. Exposed for verification against exhaustive search.
pub fn ridge_score(s: &SstMatrix, bins: &[usize], lambda: f64) -> f64 {
    let n_bins = s.n_bins();
    let q: f64 = (0..n_bins)
        .map(|l| s.row(l).iter().map(|c| c.norm()).sum::<f64>())
        .sum();
    let mut score = 0.0;
    for (m, &b) in bins.iter().enumerate() {
        let mag = s.at(b, m).norm();
        score += if mag > 0.0 {
            (mag / q).ln()
        } else {
            f64::NEG_INFINITY
        };
        if m > 0 {
            let d = bins[m] as f64 - bins[m - 1] as f64;
            score -= lambda * d * d;
        }
    }
    score
}
