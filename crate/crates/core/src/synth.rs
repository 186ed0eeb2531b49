//! Ground-truth signal generators: AM-FM respiration with a periodic shape
//! function, and spike-train ECG whose beat amplitudes are modulated by a
//! respiration waveform. Every generator exports the true instantaneous
//! frequency so downstream estimates can be scored without clinical data.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::edr::{BeatLabel, BeatSeries, Polarity};
use crate::error::{Error, Result};
use crate::signal::UniformSignal;

const TAU: f64 = std::f64::consts::TAU;

/// Slowly varying positive amplitude A(t).
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeModel {
    Constant(f64),
    /// `base * (1 + depth * sin(2 pi freq_hz t))`
    Drifting {
        base: f64,
        depth: f64,
        freq_hz: f64,
    },
}

impl AmplitudeModel {
    fn validate(&self) -> Result<()> {
        match *self {
            AmplitudeModel::Constant(c) if c > 0.0 => Ok(()),
            AmplitudeModel::Constant(c) => Err(Error::InvalidArgument(format!(
                "amplitude must be positive, got {c}"
            ))),
            AmplitudeModel::Drifting { base, depth, .. } if base > 0.0 && depth.abs() < 1.0 => {
                Ok(())
            }
            AmplitudeModel::Drifting { base, depth, .. } => Err(Error::InvalidArgument(format!(
                "drifting amplitude needs base > 0 and |depth| < 1, got {base}, {depth}"
            ))),
        }
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match *self {
            AmplitudeModel::Constant(c) => c,
            AmplitudeModel::Drifting {
                base,
                depth,
                freq_hz,
            } => base * (1.0 + depth * (TAU * freq_hz * t).sin()),
        }
    }
}

/// Increasing phase function phi(t) together with its derivative, the true
/// instantaneous frequency.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseModel {
    Constant {
        freq_hz: f64,
    },
    /// Frequency ramps linearly from `f_start` to `f_end` over `duration_s`.
    LinearRamp {
        f_start: f64,
        f_end: f64,
        duration_s: f64,
    },
    /// `base_hz * (1 + depth * sin(2 pi mod_freq_hz t))`
    SineModulated {
        base_hz: f64,
        depth: f64,
        mod_freq_hz: f64,
    },
}

impl PhaseModel {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PhaseModel::Constant { freq_hz } => freq_hz > 0.0,
            PhaseModel::LinearRamp {
                f_start,
                f_end,
                duration_s,
            } => f_start > 0.0 && f_end > 0.0 && duration_s > 0.0,
            PhaseModel::SineModulated {
                base_hz,
                depth,
                mod_freq_hz,
            } => base_hz > 0.0 && depth.abs() < 1.0 && mod_freq_hz > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "phase model must keep the instantaneous frequency positive: {self:?}"
            )))
        }
    }

    /// phi(t), in cycles.
    pub fn phase_at(&self, t: f64) -> f64 {
        match *self {
            PhaseModel::Constant { freq_hz } => freq_hz * t,
            PhaseModel::LinearRamp {
                f_start,
                f_end,
                duration_s,
            } => f_start * t + (f_end - f_start) * t * t / (2.0 * duration_s),
            PhaseModel::SineModulated {
                base_hz,
                depth,
                mod_freq_hz,
            } => {
                base_hz * (t - depth * ((TAU * mod_freq_hz * t).cos() - 1.0) / (TAU * mod_freq_hz))
            }
        }
    }

    /// phi'(t) in Hz, the ideal instantaneous frequency.
    pub fn freq_at(&self, t: f64) -> f64 {
        match *self {
            PhaseModel::Constant { freq_hz } => freq_hz,
            PhaseModel::LinearRamp {
                f_start,
                f_end,
                duration_s,
            } => f_start + (f_end - f_start) * t / duration_s,
            PhaseModel::SineModulated {
                base_hz,
                depth,
                mod_freq_hz,
            } => base_hz * (1.0 + depth * (TAU * mod_freq_hz * t).sin()),
        }
    }
}

/// Specification of a synthetic respiration record
/// `A(t) * s(2 pi phi(t)) + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct RespirationSpec {
    pub amplitude: AmplitudeModel,
    pub phase: PhaseModel,
    /// Cosine amplitudes of the 2 pi periodic shape, first harmonic first.
    /// Every higher harmonic must stay strictly below the first.
    pub shape_harmonics: Vec<f64>,
    pub noise_sd: f64,
    pub duration_s: f64,
    pub dt: f64,
}

impl RespirationSpec {
    /// Pure-cosine breathing at a constant rate.
    pub fn constant_rate(freq_hz: f64, duration_s: f64, dt: f64) -> Self {
        Self {
            amplitude: AmplitudeModel::Constant(1.0),
            phase: PhaseModel::Constant { freq_hz },
            shape_harmonics: vec![1.0],
            noise_sd: 0.0,
            duration_s,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.amplitude.validate()?;
        self.phase.validate()?;
        if self.shape_harmonics.is_empty() || self.shape_harmonics[0] == 0.0 {
            return Err(Error::InvalidArgument(
                "shape needs a nonzero first harmonic".into(),
            ));
        }
        let first = self.shape_harmonics[0].abs();
        for (k, h) in self.shape_harmonics.iter().enumerate().skip(1) {
            if h.abs() >= first {
                return Err(Error::InvalidArgument(format!(
                    "harmonic {} must stay below the first ({} >= {first})",
                    k + 1,
                    h.abs()
                )));
            }
        }
        if self.noise_sd < 0.0 {
            return Err(Error::InvalidArgument("noise sd must be >= 0".into()));
        }
        if !(self.duration_s > 0.0 && self.dt > 0.0 && self.duration_s > self.dt) {
            return Err(Error::InvalidArgument(format!(
                "need duration > dt > 0, got {} and {}",
                self.duration_s, self.dt
            )));
        }
        Ok(())
    }

    /// Shape function s evaluated at angle theta.
    fn shape(&self, theta: f64) -> f64 {
        self.shape_harmonics
            .iter()
            .enumerate()
            .map(|(i, h)| h * ((i + 1) as f64 * theta).cos())
            .sum()
    }

    /// The noise-free waveform value at time t.
    pub fn clean_value(&self, t: f64) -> f64 {
        self.amplitude.value_at(t) * self.shape(TAU * self.phase.phase_at(t))
    }

    /// The true instantaneous frequency at time t.
    pub fn iif_at(&self, t: f64) -> f64 {
        self.phase.freq_at(t)
    }
}

/// Generated respiration record plus its ground truth.
#[derive(Debug, Clone)]
pub struct RespirationOutput {
    pub signal: UniformSignal,
    /// phi'(t_m) per sample.
    pub true_iif: Vec<f64>,
}

/// Sample the respiration model on a uniform grid; deterministic per seed.
pub fn gen_respiration(spec: &RespirationSpec, seed: u64) -> Result<RespirationOutput> {
    spec.validate()?;
    let n = (spec.duration_s / spec.dt).round() as usize;
    if n < 2 {
        return Err(Error::InvalidArgument("record too short".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut samples = Vec::with_capacity(n);
    let mut true_iif = Vec::with_capacity(n);
    for m in 0..n {
        let t = m as f64 * spec.dt;
        let noise = if spec.noise_sd > 0.0 {
            spec.noise_sd * normal.sample(&mut rng)
        } else {
            0.0
        };
        samples.push(spec.clean_value(t) + noise);
        true_iif.push(spec.iif_at(t));
    }
    Ok(RespirationOutput {
        signal: UniformSignal::new(samples, spec.dt, 0.0)?,
        true_iif,
    })
}

/// Beat-interval model for the synthetic ECG.
#[derive(Debug, Clone, PartialEq)]
pub enum RrModel {
    Metronomic {
        rr_s: f64,
    },
    /// Independent uniform draws, the white-noise-like interval pattern of
    /// atrial fibrillation.
    AfUniform {
        lo_s: f64,
        hi_s: f64,
    },
    /// Interval length ramps linearly across the record.
    Ramping {
        start_s: f64,
        end_s: f64,
    },
}

impl RrModel {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RrModel::Metronomic { rr_s } => rr_s > 0.0,
            RrModel::AfUniform { lo_s, hi_s } => lo_s > 0.0 && hi_s > lo_s,
            RrModel::Ramping { start_s, end_s } => start_s > 0.0 && end_s > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "beat intervals must be positive: {self:?}"
            )))
        }
    }
}

/// Specification of a synthetic single-lead ECG: a stereotyped spike train
/// with amplitude modulation `1 + depth * resp(t_i)` per beat, optional
/// baseline drift and white noise, and optional ectopic labels.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgSpec {
    pub rr: RrModel,
    /// Width of the raised-cosine beat template, seconds.
    pub beat_width_s: f64,
    /// Clean respiration waveform whose value scales beat amplitudes.
    pub modulation: Option<RespirationSpec>,
    pub modulation_depth: f64,
    /// Fraction of beats labeled PAC. Timing and amplitude stay valid; only
    /// the label differs.
    pub pac_fraction: f64,
    /// Fraction of beats labeled PVC; their amplitude is corrupted.
    pub pvc_fraction: f64,
    /// Ventricular-filling effect: each beat's amplitude scales by
    /// `1 + c * (rr_prev - rr_mean) / rr_mean`. Inert for steady rhythms,
    /// it adds the beat-strength variability seen in irregular ones.
    pub rr_amplitude_coupling: f64,
    pub noise_sd: f64,
    pub drift_amplitude: f64,
    pub drift_freq_hz: f64,
    pub duration_s: f64,
    pub dt: f64,
}

impl EcgSpec {
    pub fn new(rr: RrModel, duration_s: f64, dt: f64) -> Self {
        Self {
            rr,
            beat_width_s: 0.04,
            modulation: None,
            modulation_depth: 0.0,
            pac_fraction: 0.0,
            pvc_fraction: 0.0,
            rr_amplitude_coupling: 0.0,
            noise_sd: 0.0,
            drift_amplitude: 0.0,
            drift_freq_hz: 0.05,
            duration_s,
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.rr.validate()?;
        if let Some(m) = &self.modulation {
            m.validate()?;
        }
        if !(self.beat_width_s > 0.0) {
            return Err(Error::InvalidArgument("beat width must be positive".into()));
        }
        if !(0.0..=1.0).contains(&(self.pac_fraction + self.pvc_fraction)) {
            return Err(Error::InvalidArgument(
                "ectopic fractions must sum to at most 1".into(),
            ));
        }
        if self.noise_sd < 0.0 || self.drift_amplitude < 0.0 {
            return Err(Error::InvalidArgument(
                "noise and drift amplitudes must be >= 0".into(),
            ));
        }
        if !(self.duration_s > 0.0 && self.dt > 0.0 && self.duration_s > self.dt) {
            return Err(Error::InvalidArgument(format!(
                "need duration > dt > 0, got {} and {}",
                self.duration_s, self.dt
            )));
        }
        Ok(())
    }
}

/// Generated ECG with its exported ground truth.
#[derive(Debug, Clone)]
pub struct EcgOutput {
    pub ecg: UniformSignal,
    /// True beat times and labels.
    pub beats: BeatSeries,
    /// Modulation phi'(t_m) per ECG sample; zeros when unmodulated.
    pub true_iif: Vec<f64>,
}

/// Place beat templates at cumulative interval times, scale each by the
/// respiration modulation, then add drift and noise. Deterministic per seed.
pub fn gen_ecg(spec: &EcgSpec, seed: u64) -> Result<EcgOutput> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;

    // beat schedule; the interval preceding each beat drives the
    // filling-dependent amplitude factor
    let rr_mean = match spec.rr {
        RrModel::Metronomic { rr_s } => rr_s,
        RrModel::AfUniform { lo_s, hi_s } => 0.5 * (lo_s + hi_s),
        RrModel::Ramping { start_s, end_s } => 0.5 * (start_s + end_s),
    };
    let mut times = Vec::new();
    let mut prev_rr = Vec::new();
    let mut t = 0.5; // settle time before the first beat
    let mut last_rr = rr_mean;
    let margin = spec.beat_width_s;
    while t < spec.duration_s - margin {
        times.push(t);
        prev_rr.push(last_rr);
        let rr = match spec.rr {
            RrModel::Metronomic { rr_s } => rr_s,
            RrModel::AfUniform { lo_s, hi_s } => rng.random_range(lo_s..hi_s),
            RrModel::Ramping { start_s, end_s } => {
                start_s + (end_s - start_s) * t / spec.duration_s
            }
        };
        t += rr;
        last_rr = rr;
    }
    if times.len() < 2 {
        return Err(Error::InvalidArgument(
            "record too short to place at least two beats".into(),
        ));
    }

    // labels
    let labels: Vec<BeatLabel> = (0..times.len())
        .map(|_| {
            let u: f64 = rng.random();
            if u < spec.pvc_fraction {
                BeatLabel::Pvc
            } else if u < spec.pvc_fraction + spec.pac_fraction {
                BeatLabel::Pac
            } else {
                BeatLabel::Normal
            }
        })
        .collect();

    // waveform
    let n = (spec.duration_s / spec.dt).round() as usize;
    let mut samples = vec![0.0; n];
    let half = spec.beat_width_s / 2.0;
    for (i, &tb) in times.iter().enumerate() {
        let mut amp = match &spec.modulation {
            Some(m) => {
                let a = 1.0 + spec.modulation_depth * m.clean_value(tb);
                if a <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "modulation drives beat {i} amplitude non-positive ({a})"
                    )));
                }
                a
            }
            None => 1.0,
        };
        if spec.rr_amplitude_coupling != 0.0 {
            let filling = 1.0 + spec.rr_amplitude_coupling * (prev_rr[i] - rr_mean) / rr_mean;
            if filling <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "interval coupling drives beat {i} amplitude non-positive ({filling})"
                )));
            }
            amp *= filling;
        }
        if labels[i] == BeatLabel::Pvc {
            // bizarre morphology: amplitude uninformative for respiration
            amp *= 2.5;
        }
        let lo = (((tb - half) / spec.dt).ceil() as isize).max(0) as usize;
        let hi = (((tb + half) / spec.dt).floor() as usize).min(n - 1);
        for (m, s) in samples[lo..=hi].iter_mut().enumerate() {
            let tau = (lo + m) as f64 * spec.dt - tb;
            *s += amp
                * (std::f64::consts::PI * tau / spec.beat_width_s)
                    .cos()
                    .powi(2);
        }
    }
    for (m, s) in samples.iter_mut().enumerate() {
        let tm = m as f64 * spec.dt;
        if spec.drift_amplitude > 0.0 {
            *s += spec.drift_amplitude * (TAU * spec.drift_freq_hz * tm).sin();
        }
        if spec.noise_sd > 0.0 {
            *s += spec.noise_sd * normal.sample(&mut rng);
        }
    }

    let true_iif = (0..n)
        .map(|m| match &spec.modulation {
            Some(md) => md.iif_at(m as f64 * spec.dt),
            None => 0.0,
        })
        .collect();

    Ok(EcgOutput {
        ecg: UniformSignal::new(samples, spec.dt, 0.0)?,
        beats: BeatSeries::new(times, labels, Polarity::R)?,
        true_iif,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_model_reduces_to_a_cosine() {
        let spec = RespirationSpec::constant_rate(0.3, 100.0, 0.05);
        let out = gen_respiration(&spec, 1).unwrap();
        for (m, &x) in out.signal.samples().iter().enumerate() {
            let t = m as f64 * 0.05;
            assert!((x - (TAU * 0.3 * t).cos()).abs() < 1e-12);
            assert_eq!(out.true_iif[m], 0.3);
        }
    }

    #[test]
    fn chirp_exports_its_analytic_frequency() {
        let spec = RespirationSpec {
            phase: PhaseModel::LinearRamp {
                f_start: 0.2,
                f_end: 0.3,
                duration_s: 1000.0,
            },
            ..RespirationSpec::constant_rate(0.2, 1000.0, 0.25)
        };
        let out = gen_respiration(&spec, 0).unwrap();
        for m in [0usize, 1000, 3999] {
            let t = m as f64 * 0.25;
            assert!((out.true_iif[m] - (0.2 + 0.0001 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn shaped_waveform_has_the_phase_period() {
        let spec = RespirationSpec {
            shape_harmonics: vec![1.0, 0.2],
            ..RespirationSpec::constant_rate(0.3, 200.0, 0.05)
        };
        let out = gen_respiration(&spec, 2).unwrap();
        let x = out.signal.samples();
        let n = x.len();
        // autocorrelation peak over lags spanning 2 s .. 5 s
        let mut best = (0usize, f64::MIN);
        for lag in 40..100 {
            let mut acc = 0.0;
            for m in 0..n - lag {
                acc += x[m] * x[m + lag];
            }
            if acc > best.1 {
                best = (lag, acc);
            }
        }
        let period = best.0 as f64 * 0.05;
        assert!((period - 1.0 / 0.3).abs() <= 0.05, "period {period}");
    }

    #[test]
    fn respiration_invariants_are_enforced() {
        let mut spec = RespirationSpec::constant_rate(0.3, 10.0, 0.05);
        spec.shape_harmonics = vec![1.0, 1.0];
        assert!(gen_respiration(&spec, 0).is_err());
        let mut spec = RespirationSpec::constant_rate(0.3, 10.0, 0.05);
        spec.amplitude = AmplitudeModel::Constant(-1.0);
        assert!(gen_respiration(&spec, 0).is_err());
        let spec = RespirationSpec::constant_rate(-0.3, 10.0, 0.05);
        assert!(gen_respiration(&spec, 0).is_err());
    }

    #[test]
    fn noise_matches_its_nominal_sd() {
        let spec = RespirationSpec {
            noise_sd: 0.25,
            ..RespirationSpec::constant_rate(0.3, 1000.0, 0.05)
        };
        let noisy = gen_respiration(&spec, 7).unwrap();
        let clean = gen_respiration(
            &RespirationSpec {
                noise_sd: 0.0,
                ..spec.clone()
            },
            7,
        )
        .unwrap();
        let diffs: Vec<f64> = noisy
            .signal
            .samples()
            .iter()
            .zip(clean.signal.samples())
            .map(|(a, b)| a - b)
            .collect();
        assert!(diffs.len() >= 10_000);
        let sd = (diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64).sqrt();
        assert!((sd - 0.25).abs() / 0.25 < 0.05, "empirical sd {sd}");
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = EcgSpec {
            noise_sd: 0.02,
            ..EcgSpec::new(
                RrModel::AfUniform {
                    lo_s: 0.4,
                    hi_s: 1.2,
                },
                60.0,
                0.004,
            )
        };
        let a = gen_ecg(&spec, 99).unwrap();
        let b = gen_ecg(&spec, 99).unwrap();
        assert_eq!(a.ecg.samples(), b.ecg.samples());
        assert_eq!(a.beats.times(), b.beats.times());
        let c = gen_ecg(&spec, 100).unwrap();
        assert_ne!(a.ecg.samples(), c.ecg.samples());
    }

    #[test]
    fn metronomic_unmodulated_beats_are_identical() {
        let spec = EcgSpec::new(RrModel::Metronomic { rr_s: 1.0 }, 30.0, 0.001);
        let out = gen_ecg(&spec, 0).unwrap();
        let peaks: Vec<f64> = out
            .beats
            .times()
            .iter()
            .map(|&t| out.ecg.samples()[out.ecg.index_at(t)])
            .collect();
        for &p in &peaks {
            assert!((p - peaks[0]).abs() < 1e-9);
        }
        assert!(out.true_iif.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn modulated_beat_amplitudes_peak_at_the_modulation_frequency() {
        let spec = EcgSpec {
            modulation: Some(RespirationSpec::constant_rate(0.25, 240.0, 0.004)),
            modulation_depth: 0.2,
            ..EcgSpec::new(RrModel::Metronomic { rr_s: 0.8 }, 240.0, 0.004)
        };
        let out = gen_ecg(&spec, 3).unwrap();
        let amps: Vec<f64> = out
            .beats
            .times()
            .iter()
            .map(|&t| out.ecg.samples()[out.ecg.index_at(t)])
            .collect();
        let n = amps.len();
        let mean = amps.iter().sum::<f64>() / n as f64;
        // crude periodogram over the beat sequence (0.8 s spacing)
        let mut best = (0.0f64, f64::MIN);
        let mut f = 0.05;
        while f < 0.6 {
            let (mut c, mut s) = (0.0, 0.0);
            for (i, &a) in amps.iter().enumerate() {
                let t = out.beats.times()[i];
                c += (a - mean) * (TAU * f * t).cos();
                s += (a - mean) * (TAU * f * t).sin();
            }
            let p = c * c + s * s;
            if p > best.1 {
                best = (f, p);
            }
            f += 0.005;
        }
        assert!((best.0 - 0.25).abs() <= 0.01, "spectral peak at {}", best.0);
    }

    #[test]
    fn excessive_modulation_depth_is_rejected() {
        let spec = EcgSpec {
            modulation: Some(RespirationSpec::constant_rate(0.25, 60.0, 0.004)),
            modulation_depth: 1.5,
            ..EcgSpec::new(RrModel::Metronomic { rr_s: 0.8 }, 60.0, 0.004)
        };
        assert!(matches!(gen_ecg(&spec, 0), Err(Error::InvalidArgument(_))));
    }
}
