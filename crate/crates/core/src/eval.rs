//! Ground-truth comparison: the intuitive instantaneous respiration rate,
//! segment-median relative error, and time-domain heart-rate-variability
//! measures.

use crate::edr::{BeatLabel, BeatSeries};
use crate::error::{Error, Result};
use crate::signal::UniformSignal;

/// Per-segment relative errors of an instantaneous-frequency estimate.
#[derive(Debug, Clone)]
pub struct SegmentErrorReport {
    /// Number of segments requested.
    pub segments_requested: usize,
    /// Signed relative errors in percent, one per segment that contained at
    /// least one valid sample pair.
    pub deltas_percent: Vec<f64>,
    /// Segments skipped because they held no valid sample.
    pub excluded_segments: usize,
    /// Median of the absolute relative errors, percent.
    pub e_k_percent: f64,
    /// Median of the signed relative errors, percent, for inspection.
    pub signed_median_percent: f64,
}

/// Sorted-middle median; even counts average the two central values.
fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Split the record into `k` equal segments, average both series per
/// segment, and take the median absolute relative error across segments.
/// Samples that are not finite in either series are ignored; segments left
/// empty by that rule are excluded and counted.
pub fn segment_error(
    if_ref: &[f64],
    if_est: &[f64],
    _dt: f64,
    k: usize,
) -> Result<SegmentErrorReport> {
    if if_ref.len() != if_est.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            if_ref.len(),
            if_est.len()
        )));
    }
    if k == 0 || k > if_ref.len() {
        return Err(Error::InvalidArgument(format!(
            "segment count must satisfy 1 <= K <= {}, got {k}",
            if_ref.len()
        )));
    }
    let n = if_ref.len();
    let mut deltas = Vec::with_capacity(k);
    let mut excluded = 0usize;
    for i in 0..k {
        let lo = i * n / k;
        let hi = (i + 1) * n / k;
        let mut sum_ref = 0.0;
        let mut sum_est = 0.0;
        let mut count = 0usize;
        for m in lo..hi {
            if if_ref[m].is_finite() && if_est[m].is_finite() {
                sum_ref += if_ref[m];
                sum_est += if_est[m];
                count += 1;
            }
        }
        if count == 0 || sum_ref == 0.0 {
            excluded += 1;
            continue;
        }
        let avg_ref = sum_ref / count as f64;
        let avg_est = sum_est / count as f64;
        deltas.push((avg_ref - avg_est) / avg_ref * 100.0);
    }
    if deltas.is_empty() {
        return Err(Error::DegenerateInput(
            "no segment contained a valid sample".into(),
        ));
    }
    let mut abs: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    let e_k = median(&mut abs);
    let mut signed = deltas.clone();
    let signed_median = median(&mut signed);
    Ok(SegmentErrorReport {
        segments_requested: k,
        deltas_percent: deltas,
        excluded_segments: excluded,
        e_k_percent: e_k,
        signed_median_percent: signed_median,
    })
}

/// The intuitive instantaneous respiration rate: the piecewise-constant
/// inverse of the most recent complete breath interval. Undefined (NaN)
/// before the second mark; held at its last value after the final mark.
pub fn irr_from_breath_marks(marks: &[f64], times: &[f64]) -> Result<Vec<f64>> {
    if marks.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 breath marks, got {}",
            marks.len()
        )));
    }
    for w in marks.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(
                "breath marks must be strictly increasing".into(),
            ));
        }
    }
    let out = times
        .iter()
        .map(|&t| {
            if t < marks[1] {
                f64::NAN
            } else {
                // largest k with marks[k] <= t
                let k = match marks.binary_search_by(|m| m.total_cmp(&t)) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                1.0 / (marks[k] - marks[k - 1])
            }
        })
        .collect();
    Ok(out)
}

/// Ends of inspiration for synthetic data: local maxima of the respiration
/// waveform above its mean, at least `min_spacing_s` apart (the larger
/// candidate wins inside the spacing window).
pub fn detect_breath_marks(resp: &UniformSignal, min_spacing_s: f64) -> Vec<f64> {
    let x = resp.samples();
    let n = x.len();
    let spacing = ((min_spacing_s / resp.dt()).round() as usize).max(1);
    let mean = x.iter().sum::<f64>() / n as f64;
    let mut marks: Vec<usize> = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if x[i] <= mean || x[i] < x[i - 1] || x[i] < x[i + 1] || x[i] == x[i - 1] {
            continue;
        }
        match marks.last() {
            Some(&last) if i - last < spacing => {
                if x[i] > x[last] {
                    *marks.last_mut().unwrap() = i;
                }
            }
            _ => marks.push(i),
        }
    }
    marks.iter().map(|&i| resp.time_at(i)).collect()
}

/// Time-domain heart-rate-variability measures over normal beats.
#[derive(Debug, Clone, PartialEq)]
pub struct HrvReport {
    pub mean_rr_ms: f64,
    /// Population standard deviation of the normal intervals.
    pub sdnn_ms: f64,
    /// Root mean square of successive interval differences.
    pub rmssd_ms: f64,
    /// Successive differences exceeding 50 ms in magnitude.
    pub nn50: usize,
    /// `nn50` as a percentage of the successive differences.
    pub pnn50_percent: f64,
}

/// Statistics over the intervals between successive normal-labeled beats;
/// PVC and PAC beats are removed before differencing, so inserting them
/// never changes the report.
pub fn hrv_time_domain(beats: &BeatSeries) -> Result<HrvReport> {
    let normal: Vec<f64> = beats
        .times()
        .iter()
        .zip(beats.labels())
        .filter(|(_, &l)| l == BeatLabel::Normal)
        .map(|(&t, _)| t)
        .collect();
    if normal.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 normal beats, got {}",
            normal.len()
        )));
    }
    let rr_ms: Vec<f64> = normal.windows(2).map(|w| (w[1] - w[0]) * 1000.0).collect();
    let n = rr_ms.len() as f64;
    let mean = rr_ms.iter().sum::<f64>() / n;
    let var = rr_ms.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let diffs: Vec<f64> = rr_ms.windows(2).map(|w| w[1] - w[0]).collect();
    let rmssd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
    let nn50 = diffs.iter().filter(|d| d.abs() > 50.0).count();
    Ok(HrvReport {
        mean_rr_ms: mean,
        sdnn_ms: var.sqrt(),
        rmssd_ms: rmssd,
        nn50,
        pnn50_percent: nn50 as f64 / diffs.len() as f64 * 100.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edr::Polarity;

    #[test]
    fn identical_series_score_zero() {
        let x = vec![0.3; 100];
        for k in [1, 4, 10] {
            let r = segment_error(&x, &x, 0.25, k).unwrap();
            assert_eq!(r.e_k_percent, 0.0);
            assert!(r.deltas_percent.iter().all(|&d| d == 0.0));
            assert_eq!(r.excluded_segments, 0);
        }
    }

    #[test]
    fn constant_offset_scores_its_relative_error() {
        let r = vec![0.30; 120];
        let e = vec![0.27; 120];
        for k in [1, 3, 12] {
            let rep = segment_error(&r, &e, 0.25, k).unwrap();
            assert!((rep.e_k_percent - 10.0).abs() < 1e-9);
            for d in &rep.deltas_percent {
                assert!((d - 10.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn median_suppresses_an_outlier_segment() {
        // three segments engineered to deltas of 1%, 2% and 100%
        let mut rf = Vec::new();
        let mut es = Vec::new();
        for (delta, n) in [(0.01, 10), (0.02, 10), (1.0, 10)] {
            for _ in 0..n {
                rf.push(1.0);
                es.push(1.0 - delta);
            }
        }
        let rep = segment_error(&rf, &es, 1.0, 3).unwrap();
        assert!((rep.e_k_percent - 2.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_both_series_preserves_the_error() {
        let rf: Vec<f64> = (0..90).map(|i| 0.2 + 0.001 * i as f64).collect();
        let es: Vec<f64> = rf.iter().map(|x| x * 1.04).collect();
        let a = segment_error(&rf, &es, 1.0, 9).unwrap();
        let rf2: Vec<f64> = rf.iter().map(|x| 3.0 * x).collect();
        let es2: Vec<f64> = es.iter().map(|x| 3.0 * x).collect();
        let b = segment_error(&rf2, &es2, 1.0, 9).unwrap();
        assert!((a.e_k_percent - b.e_k_percent).abs() < 1e-12);
    }

    #[test]
    fn single_segment_equals_whole_record_relative_error() {
        let rf = vec![0.25; 40];
        let es = vec![0.26; 40];
        let rep = segment_error(&rf, &es, 1.0, 1).unwrap();
        assert!((rep.e_k_percent - 4.0).abs() < 1e-9);
        assert!((rep.signed_median_percent + 4.0).abs() < 1e-9);
    }

    #[test]
    fn nan_samples_are_ignored_and_empty_segments_counted() {
        let mut rf = vec![0.3; 30];
        let es = vec![0.3; 30];
        for v in rf.iter_mut().take(10) {
            *v = f64::NAN;
        }
        let rep = segment_error(&rf, &es, 1.0, 3).unwrap();
        assert_eq!(rep.excluded_segments, 1);
        assert_eq!(rep.deltas_percent.len(), 2);
        assert_eq!(rep.e_k_percent, 0.0);
    }

    #[test]
    fn mismatched_lengths_and_bad_k_are_rejected() {
        assert!(segment_error(&[0.3; 10], &[0.3; 9], 1.0, 2).is_err());
        assert!(segment_error(&[0.3; 10], &[0.3; 10], 1.0, 0).is_err());
        assert!(segment_error(&[0.3; 10], &[0.3; 10], 1.0, 11).is_err());
    }

    #[test]
    fn irr_examples() {
        let times: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let irr = irr_from_breath_marks(&[0.0, 2.0, 4.0, 6.0], &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            if t < 2.0 {
                assert!(irr[i].is_nan());
            } else {
                assert!((irr[i] - 0.5).abs() < 1e-12);
            }
        }

        let irr = irr_from_breath_marks(&[0.0, 1.0, 3.0], &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            if t < 1.0 {
                assert!(irr[i].is_nan());
            } else if t < 3.0 {
                assert!((irr[i] - 1.0).abs() < 1e-12);
            } else {
                assert!((irr[i] - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn irr_requires_two_increasing_marks() {
        assert!(irr_from_breath_marks(&[1.0], &[0.0]).is_err());
        assert!(irr_from_breath_marks(&[1.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn breath_marks_recover_a_constant_rate() {
        let dt = 0.05;
        let f = 0.3;
        let n = 4000;
        let samples: Vec<f64> = (0..n)
            .map(|m| (std::f64::consts::TAU * f * m as f64 * dt).cos())
            .collect();
        let resp = UniformSignal::new(samples, dt, 0.0).unwrap();
        let marks = detect_breath_marks(&resp, 1.0);
        assert!(marks.len() >= 50);
        let times: Vec<f64> = (0..n).map(|m| m as f64 * dt).collect();
        let irr = irr_from_breath_marks(&marks, &times).unwrap();
        for v in irr.iter().filter(|v| v.is_finite()) {
            // one-sample quantization of each mark
            assert!((v - f).abs() / f < 0.04, "irr {v}");
        }
    }

    #[test]
    fn metronomic_beats_have_flat_hrv() {
        let beats = BeatSeries::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![BeatLabel::Normal; 4],
            Polarity::R,
        )
        .unwrap();
        let h = hrv_time_domain(&beats).unwrap();
        assert_eq!(h.mean_rr_ms, 1000.0);
        assert_eq!(h.sdnn_ms, 0.0);
        assert_eq!(h.rmssd_ms, 0.0);
        assert_eq!(h.nn50, 0);
        assert_eq!(h.pnn50_percent, 0.0);
    }

    #[test]
    fn rmssd_and_nn50_hand_example() {
        // intervals 800, 860, 800 ms -> successive differences +60, -60
        let beats = BeatSeries::new(
            vec![0.0, 0.8, 1.66, 2.46],
            vec![BeatLabel::Normal; 4],
            Polarity::R,
        )
        .unwrap();
        let h = hrv_time_domain(&beats).unwrap();
        assert!((h.rmssd_ms - 60.0).abs() < 1e-9);
        assert_eq!(h.nn50, 2);
        assert!((h.pnn50_percent - 100.0).abs() < 1e-12);
        assert!((h.mean_rr_ms - 820.0).abs() < 1e-9);
    }

    #[test]
    fn ectopic_beats_never_change_the_report() {
        let times = vec![0.0, 0.8, 1.66, 2.46, 3.3];
        let labels = vec![BeatLabel::Normal; 5];
        let base =
            hrv_time_domain(&BeatSeries::new(times.clone(), labels, Polarity::R).unwrap()).unwrap();

        let mut times2 = times.clone();
        times2.insert(2, 1.0);
        times2.push(4.0);
        let mut labels2 = vec![BeatLabel::Normal; 5];
        labels2.insert(2, BeatLabel::Pvc);
        labels2.push(BeatLabel::Pac);
        let with_ectopics =
            hrv_time_domain(&BeatSeries::new(times2, labels2, Polarity::R).unwrap()).unwrap();
        assert_eq!(base, with_ectopics);
    }

    #[test]
    fn shuffling_intervals_preserves_mean_and_sdnn() {
        let rr = [0.8, 0.95, 0.7, 1.1, 0.85];
        let mk = |order: &[usize]| {
            let mut t = 0.0;
            let mut times = vec![0.0];
            for &i in order {
                t += rr[i];
                times.push(t);
            }
            hrv_time_domain(
                &BeatSeries::new(
                    times.clone(),
                    vec![BeatLabel::Normal; times.len()],
                    Polarity::R,
                )
                .unwrap(),
            )
            .unwrap()
        };
        let a = mk(&[0, 1, 2, 3, 4]);
        let b = mk(&[3, 0, 4, 1, 2]);
        assert!((a.mean_rr_ms - b.mean_rr_ms).abs() < 1e-9);
        assert!((a.sdnn_ms - b.sdnn_ms).abs() < 1e-9);
        assert!((a.rmssd_ms - b.rmssd_ms).abs() > 1e-9);
    }

    #[test]
    fn too_few_normal_beats_is_invalid() {
        let beats = BeatSeries::new(
            vec![0.0, 1.0, 2.0],
            vec![BeatLabel::Normal, BeatLabel::Pvc, BeatLabel::Normal],
            Polarity::R,
        )
        .unwrap();
        assert!(matches!(
            hrv_time_domain(&beats),
            Err(Error::InvalidArgument(_))
        ));
    }
}
