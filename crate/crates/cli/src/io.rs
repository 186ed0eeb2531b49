//! File formats: uniform-signal CSV, beat annotations, the squeezed-matrix
//! dump and run logs.
//!
//! Time columns use fixed 9-decimal formatting and value columns 9
//! significant digits, so rewriting a parsed file reproduces it byte for
//! byte and the uniform-spacing check holds for long records. The time
//! resolution of the format is one nanosecond; sampling intervals below
//! that are rejected on read.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sstedr::edr::BeatSeries;
use sstedr::signal::UniformSignal;
use sstedr::sst::SstMatrix;

use crate::CliError;

pub const SIGNAL_HEADER: &str = "t,value";
pub const FREQ_HEADER: &str = "t,freq_hz";
pub const ANNOTATION_HEADER: &str = "t,label";

fn fmt_time(t: f64) -> String {
    format!("{t:.9}")
}

fn fmt_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn render_timeseries(t0: f64, dt: f64, values: &[f64], header: &str) -> String {
    let mut out = String::with_capacity(values.len() * 28 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for (m, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_time(t0 + m as f64 * dt), fmt_value(*v));
    }
    out
}

pub fn write_timeseries(
    path: &Path,
    t0: f64,
    dt: f64,
    values: &[f64],
    header: &str,
) -> Result<(), CliError> {
    fs::write(path, render_timeseries(t0, dt, values, header))
        .map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}

/// Parse a two-column time series and validate uniform spacing: the spread
/// of successive time differences must stay below 1e-6 relative to the mean
/// spacing.
pub fn read_timeseries(path: &Path, header: &str) -> Result<UniformSignal, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        Some((_, first)) => {
            return Err(CliError::input(format!(
                "{}: expected header {header:?}, found {:?}",
                path.display(),
                first.trim()
            )))
        }
        None => {
            return Err(CliError::input(format!("{}: empty file", path.display())));
        }
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (t_str, v_str) = line.split_once(',').ok_or_else(|| {
            CliError::input(format!(
                "{} line {}: expected t,value",
                path.display(),
                idx + 1
            ))
        })?;
        let t: f64 = t_str.trim().parse().map_err(|_| {
            CliError::input(format!(
                "{} line {}: bad time {t_str:?}",
                path.display(),
                idx + 1
            ))
        })?;
        let v: f64 = v_str.trim().parse().map_err(|_| {
            CliError::input(format!(
                "{} line {}: bad value {v_str:?}",
                path.display(),
                idx + 1
            ))
        })?;
        ts.push(t);
        vs.push(v);
    }
    if ts.len() < 2 {
        return Err(CliError::input(format!(
            "{}: need at least 2 samples, found {}",
            path.display(),
            ts.len()
        )));
    }
    let n = ts.len();
    let dt = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(CliError::input(format!(
            "{}: times are not increasing",
            path.display()
        )));
    }
    for (m, w) in ts.windows(2).enumerate() {
        let diff = w[1] - w[0];
        if (diff - dt).abs() > 1e-6 * dt {
            return Err(CliError::input(format!(
                "{}: non-uniform spacing at line {} ({diff} vs {dt})",
                path.display(),
                m + 3
            )));
        }
    }
    UniformSignal::new(vs, dt, ts[0]).map_err(CliError::from)
}

pub fn write_annotations(path: &Path, beats: &BeatSeries) -> Result<(), CliError> {
    let mut out = String::from(ANNOTATION_HEADER);
    out.push('\n');
    for (t, label) in beats.times().iter().zip(beats.labels()) {
        let _ = writeln!(out, "{},{}", fmt_time(*t), label.as_str());
    }
    fs::write(path, out).map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}

/// Magnitude matrix, one row per frequency bin: the first column is the bin
/// frequency, the header row carries the sample times.
pub fn write_sst_matrix(path: &Path, sst: &SstMatrix) -> Result<(), CliError> {
    let mut out = String::from("freq_hz");
    for m in 0..sst.n_times() {
        let _ = write!(out, ",{}", fmt_time(sst.t0() + m as f64 * sst.dt()));
    }
    out.push('\n');
    for l in 0..sst.n_bins() {
        out.push_str(&fmt_value(sst.grid().values()[l]));
        for c in sst.row(l) {
            let _ = write!(out, ",{}", fmt_value(c.norm()));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}

pub fn write_run_log(path: &Path, entries: &[(&str, String)]) -> Result<(), CliError> {
    let mut out = String::new();
    for (k, v) in entries {
        let _ = writeln!(out, "{k}={v}");
    }
    fs::write(path, out).map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}
