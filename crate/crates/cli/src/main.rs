//! Command-line front end: synchrosqueezing analysis, the ECG-derived
//! respiration pipeline, metric evaluation and synthetic-signal generation.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 insufficient beats,
//! 4 degenerate (all-zero) analysis.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use sstedr::edr::{detect_peaks, load_annotations, run_edr, EdrConfig};
use sstedr::eval::segment_error;
use sstedr::pipeline::{run_sst, SstConfig};
use sstedr::signal::median_detrend;
use sstedr::synth::{gen_ecg, gen_respiration, EcgSpec, PhaseModel, RespirationSpec, RrModel};

use sstedr_cli::config::ConfigFile;
use sstedr_cli::{io, CliError};

#[derive(Parser)]
#[command(
    name = "sstedr",
    version,
    about = "Synchrosqueezing-based instantaneous-frequency estimation and ECG-derived respiration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a uniform signal: extract the dominant frequency ridge
    Sst(SstArgs),
    /// Run the full ECG-derived-respiration pipeline
    Edr(EdrArgs),
    /// Score an estimated frequency track against a reference
    Eval(EvalArgs),
    /// Generate synthetic signals with exported ground truth
    Synth(SynthArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory (created if missing)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Optional key=value configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SstArgs {
    /// Input signal CSV with header `t,value`
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n_v: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_xi: Option<usize>,
    /// Also write the squeezed-magnitude matrix (sst.csv)
    #[arg(long)]
    emit_sst: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EdrArgs {
    /// Input ECG CSV with header `t,value`
    #[arg(long)]
    ecg: PathBuf,
    /// Beat annotations (`t,label` with N/PVC/PAC); the detector runs when absent
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    n_v: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_w: Option<usize>,
    #[arg(long)]
    n_xi: Option<usize>,
    /// Median-filter window in seconds
    #[arg(long)]
    detrend_window: Option<f64>,
    /// Sampling interval of the beat-amplitude spline, seconds
    #[arg(long)]
    edr_dt: Option<f64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference frequency track (`t,freq_hz`)
    #[arg(long)]
    reference: PathBuf,
    /// Estimated frequency track (`t,freq_hz`)
    #[arg(long)]
    estimate: PathBuf,
    /// Comma-separated segment counts
    #[arg(long)]
    segments: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// What to generate: `respiration` or `ecg`
    #[arg(long)]
    kind: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Record length in seconds
    #[arg(long, default_value_t = 1200.0)]
    duration: f64,
    /// Sampling interval in seconds (default 0.05 for respiration, 0.004 for ecg)
    #[arg(long)]
    dt: Option<f64>,
    /// Constant instantaneous frequency in Hz
    #[arg(long)]
    iif: Option<f64>,
    /// Linear frequency ramp `f_start,f_end` over the record
    #[arg(long)]
    iif_ramp: Option<String>,
    /// Sinusoidally wandering frequency `base,depth,mod_freq`
    #[arg(long)]
    iif_sine: Option<String>,
    /// Shape harmonics, e.g. `1.0,0.2`
    #[arg(long)]
    shape: Option<String>,
    /// Additive white-noise standard deviation
    #[arg(long, default_value_t = 0.0)]
    noise_sd: f64,
    /// Beat intervals: `metronomic:0.8`, `af` (= af:0.4,1.2) or `ramp:1.0,0.7`
    #[arg(long)]
    rr: Option<String>,
    /// Beat-amplitude modulation depth
    #[arg(long, default_value_t = 0.2)]
    modulation_depth: f64,
    /// Fraction of beats labeled PAC
    #[arg(long, default_value_t = 0.0)]
    pac_fraction: f64,
    /// Fraction of beats labeled PVC (their amplitude is corrupted)
    #[arg(long, default_value_t = 0.0)]
    pvc_fraction: f64,
    /// Beat-amplitude coupling to the preceding interval
    #[arg(long, default_value_t = 0.0)]
    rr_coupling: f64,
    /// Baseline-drift amplitude
    #[arg(long, default_value_t = 0.0)]
    drift_amplitude: f64,
    /// Baseline-drift frequency in Hz
    #[arg(long, default_value_t = 0.05)]
    drift_freq: f64,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sst(args) => cmd_sst(args),
        Command::Edr(args) => cmd_edr(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Synth(args) => cmd_synth(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message);
        std::process::exit(e.code);
    }
}

fn resolve_out_dir(common: &CommonArgs, cfg: &ConfigFile) -> Result<PathBuf, CliError> {
    let dir = common
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| CliError::input("--out-dir is required"))?;
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::input(format!("creating {}: {e}", dir.display())))?;
    Ok(dir)
}

fn cmd_sst(args: SstArgs) -> Result<(), CliError> {
    let file_cfg = ConfigFile::load(args.common.config.as_deref())?;
    let out_dir = resolve_out_dir(&args.common, &file_cfg)?;
    let defaults = SstConfig::respiration();
    let cfg = SstConfig {
        sigma: args.sigma.or(file_cfg.sigma).unwrap_or(defaults.sigma),
        n_v: args.n_v.or(file_cfg.n_v).unwrap_or(defaults.n_v),
        gamma: args.gamma.or(file_cfg.gamma).unwrap_or(defaults.gamma),
        lambda: args.lambda.or(file_cfg.lambda).unwrap_or(defaults.lambda),
        n_xi: args.n_xi.or(file_cfg.n_xi).unwrap_or(defaults.n_xi),
    };

    let signal = io::read_timeseries(&args.input, io::SIGNAL_HEADER)?;
    let analysis = run_sst(&signal, &cfg)?;

    let ridge_path = out_dir.join("ridge.csv");
    io::write_timeseries(
        &ridge_path,
        analysis.t0,
        analysis.dt,
        &analysis.inst_freq,
        io::FREQ_HEADER,
    )?;
    let mut outputs = vec!["ridge.csv".to_string()];
    if args.emit_sst {
        io::write_sst_matrix(&out_dir.join("sst.csv"), &analysis.sst)?;
        outputs.push("sst.csv".to_string());
    }
    io::write_run_log(
        &out_dir.join("run_log.txt"),
        &[
            ("command", "sst".into()),
            ("input", args.input.display().to_string()),
            ("sigma", cfg.sigma.to_string()),
            ("n-v", cfg.n_v.to_string()),
            ("gamma", cfg.gamma.to_string()),
            ("lambda", cfg.lambda.to_string()),
            ("n-xi", cfg.n_xi.to_string()),
            ("n_content", analysis.n_content.to_string()),
            ("n_padded", (2 * analysis.n_content).to_string()),
            ("outputs", outputs.join(",")),
        ],
    )?;
    Ok(())
}

fn cmd_edr(args: EdrArgs) -> Result<(), CliError> {
    let file_cfg = ConfigFile::load(args.common.config.as_deref())?;
    let out_dir = resolve_out_dir(&args.common, &file_cfg)?;
    let defaults = EdrConfig::default();
    let cfg = EdrConfig {
        sigma: args.sigma.or(file_cfg.sigma).unwrap_or(defaults.sigma),
        n_v: args.n_v.or(file_cfg.n_v).unwrap_or(defaults.n_v),
        gamma: args.gamma.or(file_cfg.gamma).unwrap_or(defaults.gamma),
        lambda: args.lambda.or(file_cfg.lambda).unwrap_or(defaults.lambda),
        n_w: args.n_w.or(file_cfg.n_w).unwrap_or(defaults.n_w),
        n_xi: args.n_xi.or(file_cfg.n_xi).unwrap_or(defaults.n_xi),
        detrend_window_s: args
            .detrend_window
            .or(file_cfg.detrend_window)
            .unwrap_or(defaults.detrend_window_s),
        edr_dt: args.edr_dt.or(file_cfg.edr_dt).unwrap_or(defaults.edr_dt),
    };

    let ecg = io::read_timeseries(&args.ecg, io::SIGNAL_HEADER)?;
    let (beats, provenance) = match &args.annotations {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
            (load_annotations(&text)?, "annotations")
        }
        None => {
            let detrended = median_detrend(&ecg, cfg.detrend_window_s)?;
            (detect_peaks(&detrended)?, "detector")
        }
    };

    let result = run_edr(&ecg, &beats, &cfg)?;
    io::write_timeseries(
        &out_dir.join("if_e.csv"),
        result.edr.t0(),
        result.edr.dt(),
        &result.if_e,
        io::FREQ_HEADER,
    )?;
    io::write_timeseries(
        &out_dir.join("edr.csv"),
        result.edr.t0(),
        result.edr.dt(),
        result.edr.samples(),
        io::SIGNAL_HEADER,
    )?;
    io::write_run_log(
        &out_dir.join("run_log.txt"),
        &[
            ("command", "edr".into()),
            ("input", args.ecg.display().to_string()),
            (
                "annotations",
                args.annotations
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| "none".into()),
            ),
            ("provenance", provenance.into()),
            ("sigma", cfg.sigma.to_string()),
            ("n-v", cfg.n_v.to_string()),
            ("gamma", cfg.gamma.to_string()),
            ("lambda", cfg.lambda.to_string()),
            ("n-w", cfg.n_w.to_string()),
            ("n-xi", cfg.n_xi.to_string()),
            ("detrend-window", cfg.detrend_window_s.to_string()),
            ("edr-dt", cfg.edr_dt.to_string()),
            ("polarity", beats.polarity().to_string()),
            ("beats_total", result.info.beats_total.to_string()),
            (
                "beats_pvc_excluded",
                result.info.beats_pvc_excluded.to_string(),
            ),
            (
                "beats_beyond_window",
                result.info.beats_beyond_window.to_string(),
            ),
            ("kappa", result.info.kappa.to_string()),
            ("n_samples", result.if_e.len().to_string()),
            ("outputs", "if_e.csv,edr.csv".into()),
        ],
    )?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let file_cfg = ConfigFile::load(args.common.config.as_deref())?;
    let out_dir = resolve_out_dir(&args.common, &file_cfg)?;
    let segments_spec = args
        .segments
        .or(file_cfg.segments)
        .unwrap_or_else(|| "240,120,20".to_string());
    let ks: Vec<usize> = segments_spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::input(format!("bad segment count {s:?}")))
        })
        .collect::<Result<_, _>>()?;

    let reference = io::read_timeseries(&args.reference, io::FREQ_HEADER)?;
    let estimate = io::read_timeseries(&args.estimate, io::FREQ_HEADER)?;
    if reference.len() != estimate.len()
        || (reference.dt() - estimate.dt()).abs() > 1e-6 * reference.dt()
        || (reference.t0() - estimate.t0()).abs() > 0.5 * reference.dt()
    {
        return Err(CliError::input(format!(
            "misaligned tracks: {} samples from {} at dt {} vs {} samples from {} at dt {}",
            reference.len(),
            reference.t0(),
            reference.dt(),
            estimate.len(),
            estimate.t0(),
            estimate.dt()
        )));
    }

    let mut segments = Vec::new();
    for &k in &ks {
        let report = segment_error(reference.samples(), estimate.samples(), reference.dt(), k)?;
        segments.push(serde_json::json!({
            "k": k,
            "e_k_percent": report.e_k_percent,
            "signed_median_percent": report.signed_median_percent,
            "excluded_segments": report.excluded_segments,
            "deltas_percent": report.deltas_percent,
        }));
    }
    let metrics = serde_json::json!({
        "reference": args.reference.display().to_string(),
        "estimate": args.estimate.display().to_string(),
        "n_samples": reference.len(),
        "segments": segments,
    });
    let path = out_dir.join("metrics.json");
    fs::write(&path, format!("{:#}\n", metrics))
        .map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))?;
    io::write_run_log(
        &out_dir.join("run_log.txt"),
        &[
            ("command", "eval".into()),
            ("reference", args.reference.display().to_string()),
            ("estimate", args.estimate.display().to_string()),
            ("segments", segments_spec),
            ("outputs", "metrics.json".into()),
        ],
    )?;
    Ok(())
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::input(format!("bad {what} {s:?}, expected a,b")))?;
    Ok((
        a.trim()
            .parse()
            .map_err(|_| CliError::input(format!("bad {what} {s:?}")))?,
        b.trim()
            .parse()
            .map_err(|_| CliError::input(format!("bad {what} {s:?}")))?,
    ))
}

fn phase_model(args: &SynthArgs) -> Result<PhaseModel, CliError> {
    let picked = [
        args.iif.is_some(),
        args.iif_ramp.is_some(),
        args.iif_sine.is_some(),
    ]
    .iter()
    .filter(|&&p| p)
    .count();
    if picked > 1 {
        return Err(CliError::input(
            "choose at most one of --iif, --iif-ramp, --iif-sine",
        ));
    }
    if let Some(ramp) = &args.iif_ramp {
        let (f_start, f_end) = parse_pair(ramp, "--iif-ramp")?;
        return Ok(PhaseModel::LinearRamp {
            f_start,
            f_end,
            duration_s: args.duration,
        });
    }
    if let Some(sine) = &args.iif_sine {
        let parts: Vec<&str> = sine.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::input(format!(
                "bad --iif-sine {sine:?}, expected base,depth,mod_freq"
            )));
        }
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::input(format!("bad --iif-sine {sine:?}")))
        };
        return Ok(PhaseModel::SineModulated {
            base_hz: parse(parts[0])?,
            depth: parse(parts[1])?,
            mod_freq_hz: parse(parts[2])?,
        });
    }
    Ok(PhaseModel::Constant {
        freq_hz: args.iif.unwrap_or(0.3),
    })
}

fn respiration_spec(args: &SynthArgs, dt: f64) -> Result<RespirationSpec, CliError> {
    let shape_harmonics = match &args.shape {
        Some(s) => s
            .split(',')
            .map(|h| {
                h.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::input(format!("bad --shape {s:?}")))
            })
            .collect::<Result<Vec<f64>, _>>()?,
        None => vec![1.0],
    };
    Ok(RespirationSpec {
        phase: phase_model(args)?,
        shape_harmonics,
        noise_sd: args.noise_sd,
        ..RespirationSpec::constant_rate(0.3, args.duration, dt)
    })
}

fn rr_model(spec: Option<&str>) -> Result<RrModel, CliError> {
    let spec = spec.unwrap_or("metronomic:0.8");
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    match kind {
        "metronomic" => {
            let rr_s = match rest {
                Some(r) => r
                    .trim()
                    .parse()
                    .map_err(|_| CliError::input(format!("bad --rr {spec:?}")))?,
                None => 0.8,
            };
            Ok(RrModel::Metronomic { rr_s })
        }
        "af" => {
            let (lo_s, hi_s) = match rest {
                Some(r) => parse_pair(r, "--rr")?,
                None => (0.4, 1.2),
            };
            Ok(RrModel::AfUniform { lo_s, hi_s })
        }
        "ramp" => {
            let (start_s, end_s) = match rest {
                Some(r) => parse_pair(r, "--rr")?,
                None => return Err(CliError::input("--rr ramp needs start,end")),
            };
            Ok(RrModel::Ramping { start_s, end_s })
        }
        other => Err(CliError::input(format!(
            "unknown --rr kind {other:?}, expected metronomic, af or ramp"
        ))),
    }
}

fn cmd_synth(args: SynthArgs) -> Result<(), CliError> {
    let file_cfg = ConfigFile::load(args.common.config.as_deref())?;
    let out_dir = resolve_out_dir(&args.common, &file_cfg)?;
    let seed = args.seed.or(file_cfg.seed).unwrap_or(0);

    let mut log: Vec<(&str, String)> = vec![
        ("command", "synth".into()),
        ("kind", args.kind.clone()),
        ("seed", seed.to_string()),
        ("duration", args.duration.to_string()),
    ];

    match args.kind.as_str() {
        "respiration" => {
            let dt = args.dt.unwrap_or(0.05);
            let spec = respiration_spec(&args, dt)?;
            let out = gen_respiration(&spec, seed)?;
            io::write_timeseries(
                &out_dir.join("signal.csv"),
                out.signal.t0(),
                out.signal.dt(),
                out.signal.samples(),
                io::SIGNAL_HEADER,
            )?;
            io::write_timeseries(
                &out_dir.join("truth_iif.csv"),
                out.signal.t0(),
                out.signal.dt(),
                &out.true_iif,
                io::FREQ_HEADER,
            )?;
            log.push(("dt", dt.to_string()));
            log.push(("phase", format!("{:?}", spec.phase)));
            log.push(("shape", format!("{:?}", spec.shape_harmonics)));
            log.push(("noise-sd", spec.noise_sd.to_string()));
            log.push(("outputs", "signal.csv,truth_iif.csv".into()));
        }
        "ecg" => {
            let dt = args.dt.unwrap_or(0.004);
            let modulation = respiration_spec(&args, dt)?;
            let rr = rr_model(args.rr.as_deref())?;
            let spec = EcgSpec {
                modulation: Some(modulation),
                modulation_depth: args.modulation_depth,
                pac_fraction: args.pac_fraction,
                pvc_fraction: args.pvc_fraction,
                rr_amplitude_coupling: args.rr_coupling,
                noise_sd: args.noise_sd,
                drift_amplitude: args.drift_amplitude,
                drift_freq_hz: args.drift_freq,
                ..EcgSpec::new(rr.clone(), args.duration, dt)
            };
            let out = gen_ecg(&spec, seed)?;
            io::write_timeseries(
                &out_dir.join("ecg.csv"),
                out.ecg.t0(),
                out.ecg.dt(),
                out.ecg.samples(),
                io::SIGNAL_HEADER,
            )?;
            io::write_annotations(&out_dir.join("beats.csv"), &out.beats)?;
            io::write_timeseries(
                &out_dir.join("truth_iif.csv"),
                out.ecg.t0(),
                out.ecg.dt(),
                &out.true_iif,
                io::FREQ_HEADER,
            )?;
            log.push(("dt", dt.to_string()));
            log.push(("rr", format!("{rr:?}")));
            log.push(("modulation-depth", args.modulation_depth.to_string()));
            log.push(("pac-fraction", args.pac_fraction.to_string()));
            log.push(("pvc-fraction", args.pvc_fraction.to_string()));
            log.push(("rr-coupling", args.rr_coupling.to_string()));
            log.push(("noise-sd", args.noise_sd.to_string()));
            log.push(("beats_total", out.beats.len().to_string()));
            log.push(("outputs", "ecg.csv,beats.csv,truth_iif.csv".into()));
        }
        other => {
            return Err(CliError::input(format!(
                "unknown --kind {other:?}, expected respiration or ecg"
            )))
        }
    }
    io::write_run_log(&out_dir.join("run_log.txt"), &log)?;
    Ok(())
}
