//! ECG-derived respiration: beat detection and annotation loading, the
//! beat-amplitude spline, and the composed pipeline from raw ECG to the
//! estimated respiration frequency and waveform.

use crate::cwt::WaveletSpec;
use crate::error::{Error, Result};
use crate::pipeline::{calibrate_kappa, run_sst, SstConfig};
use crate::reconstruct::reconstruct_band;
use crate::signal::{median_detrend, UniformSignal};
use crate::spline::CubicSpline;
use crate::sst::SstMatrix;

/// Which peak family carries the amplitude information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    R,
    S,
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarity::R => write!(f, "R"),
            Polarity::S => write!(f, "S"),
        }
    }
}

/// Beat classification. PVC amplitudes are excluded from the spline; PAC
/// beats are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeatLabel {
    Normal,
    Pvc,
    Pac,
}

impl BeatLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            BeatLabel::Normal => "N",
            BeatLabel::Pvc => "PVC",
            BeatLabel::Pac => "PAC",
        }
    }

    pub fn parse(s: &str) -> Option<BeatLabel> {
        match s {
            "N" => Some(BeatLabel::Normal),
            "PVC" => Some(BeatLabel::Pvc),
            "PAC" => Some(BeatLabel::Pac),
            _ => None,
        }
    }
}

/// Detected or annotated beats: strictly increasing times with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatSeries {
    times: Vec<f64>,
    labels: Vec<BeatLabel>,
    polarity: Polarity,
}

impl BeatSeries {
    pub fn new(times: Vec<f64>, labels: Vec<BeatLabel>, polarity: Polarity) -> Result<Self> {
        if times.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} beat times but {} labels",
                times.len(),
                labels.len()
            )));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(format!(
                    "beat times must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self {
            times,
            labels,
            polarity,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn labels(&self) -> &[BeatLabel] {
        &self.labels
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// A copy with every PAC relabeled PVC, i.e. excluded downstream.
    pub fn with_pacs_excluded(&self) -> BeatSeries {
        BeatSeries {
            times: self.times.clone(),
            labels: self
                .labels
                .iter()
                .map(|&l| {
                    if l == BeatLabel::Pac {
                        BeatLabel::Pvc
                    } else {
                        l
                    }
                })
                .collect(),
            polarity: self.polarity,
        }
    }
}

/// Locate beats in a detrended single-lead ECG.
///
/// Polarity is chosen by comparing the median of the top decile of positive
/// sample values against the negative counterpart, a single-lead proxy for
/// the Rs-vs-rS axis rule. Peaks are local maxima (of the negated signal for
/// S polarity) above an adaptive threshold, with a 200 ms refractory period;
/// within the refractory window the larger candidate wins.
pub fn detect_peaks(ecg: &UniformSignal) -> Result<BeatSeries> {
    let polarity = if decile_median(ecg.samples(), true) >= decile_median(ecg.samples(), false) {
        Polarity::R
    } else {
        Polarity::S
    };
    let work: Vec<f64> = match polarity {
        Polarity::R => ecg.samples().to_vec(),
        Polarity::S => ecg.samples().iter().map(|x| -x).collect(),
    };

    let refractory = (0.2 / ecg.dt()).round() as usize;
    // first pass: threshold from the global amplitude statistics
    let mut threshold = 0.4 * decile_median(&work, true);
    if !(threshold > 0.0) {
        return Err(Error::InsufficientBeats {
            found: 0,
            required: 4,
        });
    }
    for _ in 0..2 {
        let peaks = local_maxima_above(&work, threshold, refractory);
        if peaks.is_empty() {
            break;
        }
        // refine: half the median detected peak height
        let mut heights: Vec<f64> = peaks.iter().map(|&i| work[i]).collect();
        heights.sort_by(|a, b| a.total_cmp(b));
        threshold = 0.5 * heights[heights.len() / 2];
    }
    let peaks = local_maxima_above(&work, threshold, refractory);
    if peaks.len() < 4 {
        return Err(Error::InsufficientBeats {
            found: peaks.len(),
            required: 4,
        });
    }
    let times: Vec<f64> = peaks.iter().map(|&i| ecg.time_at(i)).collect();
    BeatSeries::new(times, vec![BeatLabel::Normal; peaks.len()], polarity)
}

/// Median of the top decile of positive (or negated negative) samples;
/// zero when no sample has the requested sign.
fn decile_median(x: &[f64], positive: bool) -> f64 {
    let mut vals: Vec<f64> = x
        .iter()
        .filter_map(|&v| {
            if positive && v > 0.0 {
                Some(v)
            } else if !positive && v < 0.0 {
                Some(-v)
            } else {
                None
            }
        })
        .collect();
    if vals.is_empty() {
        return 0.0;
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    let decile = (vals.len() / 10).max(1);
    vals[decile / 2]
}

fn local_maxima_above(x: &[f64], threshold: f64, refractory: usize) -> Vec<usize> {
    let n = x.len();
    let mut peaks: Vec<usize> = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if x[i] <= threshold || x[i] < x[i - 1] || x[i] < x[i + 1] {
            continue;
        }
        // plateau: keep only the left edge
        if x[i] == x[i - 1] {
            continue;
        }
        match peaks.last() {
            Some(&last) if i - last < refractory => {
                if x[i] > x[last] {
                    *peaks.last_mut().unwrap() = i;
                }
            }
            _ => peaks.push(i),
        }
    }
    peaks
}

/// Parse beat annotations: one `<seconds>,<label>` record per line with
/// label in {N, PVC, PAC}; `#` comments and an optional `t,label` header are
/// ignored. Times must be strictly increasing.
pub fn load_annotations(text: &str) -> Result<BeatSeries> {
    let mut times = Vec::new();
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if times.is_empty() && line == "t,label" {
            continue;
        }
        let lineno = idx + 1;
        let (t_str, l_str) = line.split_once(',').ok_or(Error::AnnotationParse {
            line: lineno,
            reason: "expected <seconds>,<label>".into(),
        })?;
        let t: f64 = t_str.trim().parse().map_err(|_| Error::AnnotationParse {
            line: lineno,
            reason: format!("bad time {t_str:?}"),
        })?;
        let label = BeatLabel::parse(l_str.trim()).ok_or(Error::AnnotationParse {
            line: lineno,
            reason: format!("bad label {l_str:?}, expected N, PVC or PAC"),
        })?;
        times.push(t);
        labels.push(label);
    }
    if times.is_empty() {
        return Err(Error::InsufficientBeats {
            found: 0,
            required: 1,
        });
    }
    BeatSeries::new(times, labels, Polarity::R)
}

/// The beat-amplitude respiration estimate: a natural cubic spline through
/// the detrended-ECG amplitude at every non-PVC beat, sampled uniformly at
/// `edr_dt` from the first retained beat to the last.
pub fn build_edr_t(ecg: &UniformSignal, beats: &BeatSeries, edr_dt: f64) -> Result<UniformSignal> {
    if !(edr_dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "edr_dt must be positive, got {edr_dt}"
        )));
    }
    let mut knots_t = Vec::new();
    let mut knots_v = Vec::new();
    for (i, &t) in beats.times().iter().enumerate() {
        if beats.labels()[i] == BeatLabel::Pvc {
            continue;
        }
        knots_t.push(t);
        knots_v.push(ecg.samples()[ecg.index_at(t)]);
    }
    if knots_t.len() < 4 {
        return Err(Error::InsufficientBeats {
            found: knots_t.len(),
            required: 4,
        });
    }
    let spline = CubicSpline::natural(knots_t.clone(), knots_v)?;
    let t_first = knots_t[0];
    let t_last = *knots_t.last().unwrap();
    let n = ((t_last - t_first) / edr_dt + 1e-9).floor() as usize + 1;
    if n < 2 {
        return Err(Error::InsufficientBeats {
            found: knots_t.len(),
            required: 4,
        });
    }
    let samples = (0..n)
        .map(|k| spline.eval(t_first + k as f64 * edr_dt))
        .collect();
    UniformSignal::new(samples, edr_dt, t_first)
}

/// Parameters of the full ECG-derived-respiration pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct EdrConfig {
    pub sigma: f64,
    pub n_v: usize,
    pub gamma: f64,
    pub lambda: f64,
    pub n_w: usize,
    pub n_xi: usize,
    /// Median-filter window for baseline removal, seconds.
    pub detrend_window_s: f64,
    /// Sampling interval of the beat-amplitude spline, seconds.
    pub edr_dt: f64,
}

impl Default for EdrConfig {
    fn default() -> Self {
        Self {
            sigma: 0.125,
            n_v: 32,
            gamma: 1e-8,
            lambda: 10.0,
            n_w: 80,
            n_xi: 512,
            detrend_window_s: 0.1,
            edr_dt: 0.25,
        }
    }
}

impl EdrConfig {
    pub fn sst_config(&self) -> SstConfig {
        SstConfig {
            sigma: self.sigma,
            n_v: self.n_v,
            gamma: self.gamma,
            lambda: self.lambda,
            n_xi: self.n_xi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sst_config().validate()?;
        if !(self.detrend_window_s > 0.0 && self.edr_dt > 0.0) {
            return Err(Error::InvalidArgument(
                "detrend window and edr_dt must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Bookkeeping from one pipeline run, for logs and reproducibility.
#[derive(Debug, Clone)]
pub struct EdrRunInfo {
    pub beats_total: usize,
    pub beats_pvc_excluded: usize,
    /// Beats falling after the dyadic-truncated analysis window.
    pub beats_beyond_window: usize,
    pub kappa: f64,
}

/// Output of the full pipeline.
#[derive(Debug, Clone)]
pub struct EdrOutput {
    /// Estimated instantaneous respiration frequency at each analysis sample.
    pub if_e: Vec<f64>,
    /// Reconstructed respiration waveform.
    pub edr: UniformSignal,
    /// Squeezed matrix over the analysis window.
    pub sst: SstMatrix,
    pub info: EdrRunInfo,
}

/// Detrend, build the beat-amplitude spline, run the synchrosqueezing chain
/// and reconstruct the respiration waveform around the extracted ridge.
pub fn run_edr(ecg: &UniformSignal, beats: &BeatSeries, cfg: &EdrConfig) -> Result<EdrOutput> {
    cfg.validate()?;
    let detrended = median_detrend(ecg, cfg.detrend_window_s)?;
    let edr_t = build_edr_t(&detrended, beats, cfg.edr_dt)?;
    let analysis = run_sst(&edr_t, &cfg.sst_config())?;
    let spec = WaveletSpec::new(cfg.sigma)?;
    let kappa = calibrate_kappa(&spec, cfg.n_v)?;
    let edr_wave = reconstruct_band(&analysis.sst, &analysis.ridge, cfg.n_w, kappa)?;

    let window_end = analysis.t0 + (analysis.n_content - 1) as f64 * cfg.edr_dt;
    let beats_beyond_window = beats
        .times()
        .iter()
        .filter(|&&t| t > window_end + 1e-9)
        .count();
    let beats_pvc_excluded = beats
        .labels()
        .iter()
        .filter(|&&l| l == BeatLabel::Pvc)
        .count();

    Ok(EdrOutput {
        if_e: analysis.inst_freq,
        edr: edr_wave,
        sst: analysis.sst,
        info: EdrRunInfo {
            beats_total: beats.len(),
            beats_pvc_excluded,
            beats_beyond_window,
            kappa,
        },
    })
}
