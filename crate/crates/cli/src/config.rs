//! Optional TOML defaults. Keys are the long flag names without dashes
//! prefix, e.g. `split-at = 50`; flags given on the command line win.

use std::path::{Path, PathBuf};

use irp_core::EngineConfig;
use serde::Deserialize;

use crate::args::{EngineArgs, Format, MethodArg, ModeArg, TaskArg};
use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub k_max: Option<u32>,
    pub format: Option<Format>,
    pub m: Option<u64>,
    pub k: Option<u64>,
    pub train: Option<PathBuf>,
    pub split_at: Option<usize>,
    pub test: Option<PathBuf>,
    pub task: Option<TaskArg>,
    pub epsilon: Option<f64>,
    pub method: Option<MethodArg>,
    pub seed: Option<u64>,
    pub learning_rate: Option<f64>,
    pub epochs: Option<usize>,
    pub regularization: Option<f64>,
    pub mode: Option<ModeArg>,
    pub l: Option<usize>,
    pub trials: Option<u64>,
    pub threshold: Option<f64>,
    pub noise: Option<f64>,
    pub dim: Option<usize>,
    pub grid_points: Option<usize>,
    pub refine_tol: Option<f64>,
    pub constant_tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }

    pub fn engine(&self, args: &EngineArgs) -> CliResult<EngineConfig> {
        let d = EngineConfig::default();
        let cfg = EngineConfig {
            grid_points: args
                .grid_points
                .or(self.grid_points)
                .unwrap_or(d.grid_points),
            refine_tol: args.refine_tol.or(self.refine_tol).unwrap_or(d.refine_tol),
            constant_tol: args
                .constant_tol
                .or(self.constant_tol)
                .unwrap_or(d.constant_tol),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Flag value, else config value, else a usage error naming the flag.
pub fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> CliResult<T> {
    flag.or(config)
        .ok_or_else(|| CliError::usage(format!("missing required --{name}")))
}
