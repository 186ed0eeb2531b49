//! Optional `key=value` configuration file. Precedence is built-in defaults,
//! then the file, then explicit command-line flags. Unknown keys are
//! rejected.

use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    pub sigma: Option<f64>,
    pub n_v: Option<usize>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub n_w: Option<usize>,
    pub n_xi: Option<usize>,
    pub detrend_window: Option<f64>,
    pub edr_dt: Option<f64>,
    pub segments: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut cfg = ConfigFile::default();
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!(
                    "{} line {}: expected key=value",
                    path.display(),
                    idx + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let parse_err = |what: &str| {
                CliError::input(format!(
                    "{} line {}: bad {what} value {value:?}",
                    path.display(),
                    idx + 1
                ))
            };
            match key {
                "sigma" => cfg.sigma = Some(value.parse().map_err(|_| parse_err("sigma"))?),
                "n-v" => cfg.n_v = Some(value.parse().map_err(|_| parse_err("n-v"))?),
                "gamma" => cfg.gamma = Some(value.parse().map_err(|_| parse_err("gamma"))?),
                "lambda" => cfg.lambda = Some(value.parse().map_err(|_| parse_err("lambda"))?),
                "n-w" => cfg.n_w = Some(value.parse().map_err(|_| parse_err("n-w"))?),
                "n-xi" => cfg.n_xi = Some(value.parse().map_err(|_| parse_err("n-xi"))?),
                "detrend-window" => {
                    cfg.detrend_window =
                        Some(value.parse().map_err(|_| parse_err("detrend-window"))?)
                }
                "edr-dt" => cfg.edr_dt = Some(value.parse().map_err(|_| parse_err("edr-dt"))?),
                "segments" => cfg.segments = Some(value.to_string()),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| parse_err("seed"))?),
                "out-dir" => cfg.out_dir = Some(PathBuf::from(value)),
                other => {
                    return Err(CliError::input(format!(
                        "{} line {}: unknown key {other:?}",
                        path.display(),
                        idx + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }
}
