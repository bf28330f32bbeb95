//! Benchmark configuration: presets, key=value config files, CLI overrides.

use std::path::PathBuf;

use crate::error::CliError;

/// Scale preset for the benchmark protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Reduced trial counts that finish on a workstation.
    Desk,
    /// Full trial counts of the reference experiments.
    Paper,
}

impl Preset {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(CliError::usage(format!(
                "unknown preset {other:?} (expected desk or paper)"
            ))),
        }
    }
}

/// Full benchmark configuration; one instance per command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub trials_pointwise: usize,
    pub trials_learning: usize,
    pub n_grid: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    /// Risk level of the learning protocol (must satisfy alpha < 1/2).
    pub alpha_learning: f64,
    pub delta: f64,
    /// Family ids; None picks the per-command default set.
    pub families: Option<Vec<String>>,
    pub budget_multiplier: f64,
    pub d: usize,
    pub out_dir: PathBuf,
    pub base_seed: u64,
    /// Training-set size of the learning protocol.
    pub n_learning: usize,
    /// Independent test-set size for excess-risk evaluation.
    pub test_size: usize,
    /// Number of budget checkpoints recorded per learning run.
    pub checkpoints: usize,
    /// Target inter-quartile range of the pointwise families.
    pub iqr_width: f64,
}

impl BenchConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Desk => BenchConfig {
                trials_pointwise: 1000,
                trials_learning: 50,
                n_grid: vec![1000, 3162, 10_000],
                alpha_grid: vec![0.02, 0.05, 0.1],
                alpha_learning: 0.05,
                delta: 0.02,
                families: None,
                budget_multiplier: 40.0,
                d: 2,
                out_dir: PathBuf::from("bench-out"),
                base_seed: 1,
                n_learning: 500,
                test_size: 100_000,
                checkpoints: 10,
                iqr_width: 3.4,
            },
            Preset::Paper => BenchConfig {
                trials_pointwise: 10_000,
                trials_learning: 250,
                n_grid: vec![1000, 2000, 4000, 8000, 16_000, 32_000],
                alpha_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2],
                ..BenchConfig::preset(Preset::Desk)
            },
        }
    }

    /// Apply one key=value pair (from a config file).
    fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::usage(format!("config key {key}: bad {what} {value:?}"));
        match key {
            "preset" => *self = BenchConfig::preset(Preset::parse(value)?),
            "trials" => {
                let t = value.parse().map_err(|_| bad("integer"))?;
                self.trials_pointwise = t;
                self.trials_learning = t;
            }
            "trials_pointwise" => {
                self.trials_pointwise = value.parse().map_err(|_| bad("integer"))?
            }
            "trials_learning" => {
                self.trials_learning = value.parse().map_err(|_| bad("integer"))?
            }
            "n_grid" => {
                self.n_grid = split_list(value)
                    .map(|v| v.parse().map_err(|_| bad("integer list")))
                    .collect::<Result<_, _>>()?;
            }
            "alpha_grid" => {
                self.alpha_grid = split_list(value)
                    .map(|v| v.parse().map_err(|_| bad("real list")))
                    .collect::<Result<_, _>>()?;
            }
            "alpha_learning" => self.alpha_learning = value.parse().map_err(|_| bad("real"))?,
            "delta" => self.delta = value.parse().map_err(|_| bad("real"))?,
            "families" => {
                self.families = Some(split_list(value).map(str::to_string).collect());
            }
            "budget_multiplier" => {
                self.budget_multiplier = value.parse().map_err(|_| bad("real"))?
            }
            "d" => self.d = value.parse().map_err(|_| bad("integer"))?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "base_seed" => self.base_seed = value.parse().map_err(|_| bad("integer"))?,
            "n_learning" => self.n_learning = value.parse().map_err(|_| bad("integer"))?,
            "test_size" => self.test_size = value.parse().map_err(|_| bad("integer"))?,
            "checkpoints" => self.checkpoints = value.parse().map_err(|_| bad("integer"))?,
            "iqr_width" => self.iqr_width = value.parse().map_err(|_| bad("real"))?,
            other => {
                return Err(CliError::usage(format!("unknown config key {other:?}")));
            }
        }
        Ok(())
    }

    /// Parse a `key=value` config file (`#` comments, blank lines allowed)
    /// on top of the current values.
    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    idx + 1
                ))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials_pointwise < 1 || self.trials_learning < 1 {
            return Err(CliError::usage("trials must be at least 1"));
        }
        if self.n_grid.is_empty() || self.alpha_grid.is_empty() {
            return Err(CliError::usage("n_grid and alpha_grid must be non-empty"));
        }
        for &a in &self.alpha_grid {
            check_alpha(a)?;
        }
        check_alpha(self.alpha_learning)?;
        if self.alpha_learning >= 0.5 {
            return Err(CliError::usage(format!(
                "learning alpha must be below 1/2, got {}",
                self.alpha_learning
            )));
        }
        check_delta(self.delta)?;
        if self.budget_multiplier < 1.0 {
            return Err(CliError::usage("budget_multiplier must be at least 1"));
        }
        if self.d < 1 {
            return Err(CliError::usage("d must be at least 1"));
        }
        if self.checkpoints < 1 {
            return Err(CliError::usage("checkpoints must be at least 1"));
        }
        Ok(())
    }

    /// Deterministic key=value dump for the metadata sidecar.
    pub fn dump(&self) -> Vec<String> {
        let fam = match &self.families {
            Some(f) => f.join(","),
            None => "(command default)".to_string(),
        };
        vec![
            format!("trials_pointwise={}", self.trials_pointwise),
            format!("trials_learning={}", self.trials_learning),
            format!(
                "n_grid={}",
                self.n_grid
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!(
                "alpha_grid={}",
                self.alpha_grid
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            format!("alpha_learning={}", self.alpha_learning),
            format!("delta={}", self.delta),
            format!("families={fam}"),
            format!("budget_multiplier={}", self.budget_multiplier),
            format!("d={}", self.d),
            format!("out_dir={}", self.out_dir.display()),
            format!("base_seed={}", self.base_seed),
            format!("n_learning={}", self.n_learning),
            format!("test_size={}", self.test_size),
            format!("checkpoints={}", self.checkpoints),
            format!("iqr_width={}", self.iqr_width),
        ]
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "alpha must lie in the open interval (0,1), got {alpha}"
        )))
    }
}

pub fn check_delta(delta: f64) -> Result<(), CliError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(CliError::usage(format!(
            "delta must lie in the open interval (0,1), got {delta}"
        )))
    }
}
