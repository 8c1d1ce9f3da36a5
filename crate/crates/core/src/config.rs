//! Flat `key = value` run configuration with defaults, overrides and
//! validation.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::body::BodyLimits;
use crate::lsystem::RewriteConfig;
use crate::moea::{EvolutionConfig, Mode, SurvivorSelection};
use crate::sim::SimConfig;

/// Which experiments a `run` invocation executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Baseline,
    Battery,
    /// Baseline first, then battery, into the same robots table.
    Both,
}

impl RunMode {
    pub fn experiment_modes(&self) -> Vec<Mode> {
        match self {
            RunMode::Baseline => vec![Mode::Baseline],
            RunMode::Battery => vec![Mode::Battery],
            RunMode::Both => vec![Mode::Baseline, Mode::Battery],
        }
    }
}

/// Complete configuration of an experiment run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub evolution: EvolutionConfig,
    pub sim: SimConfig,
    pub rewrite: RewriteConfig,
    pub limits: BodyLimits,
    pub repetitions: u32,
    pub out_dir: PathBuf,
    pub mode: RunMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            evolution: EvolutionConfig::default(),
            sim: SimConfig::default(),
            rewrite: RewriteConfig::default(),
            limits: BodyLimits::default(),
            repetitions: 10,
            out_dir: PathBuf::from("out"),
            mode: RunMode::Both,
        }
    }
}

impl RunConfig {
    /// Evolution parameters for one experiment of this run.
    pub fn evolution_for(&self, mode: Mode) -> EvolutionConfig {
        EvolutionConfig {
            mode,
            ..self.evolution.clone()
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("key `{key}`: {msg}")]
    OutOfRange { key: String, msg: String },
}

fn bad(key: &str, value: &str) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

fn range_err(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::OutOfRange {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn set_key(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    macro_rules! num {
        ($ty:ty) => {
            value.trim().parse::<$ty>().map_err(|_| bad(key, value))?
        };
    }
    match key {
        "mu" => cfg.evolution.mu = num!(usize),
        "lambda" => cfg.evolution.lambda = num!(usize),
        "generations" => cfg.evolution.generations = num!(u32),
        "tournament_k" => cfg.evolution.tournament_k = num!(usize),
        "p_crossover" => cfg.evolution.p_crossover = num!(f64),
        "p_mutation" => cfg.evolution.p_mutation = num!(f64),
        "seed" => cfg.evolution.master_seed = num!(u64),
        "survivor_selection" => {
            cfg.evolution.survivor_selection = match value.trim() {
                "nsga2_truncation" => SurvivorSelection::Nsga2Truncation,
                "tournament" => SurvivorSelection::Tournament,
                _ => return Err(bad(key, value)),
            }
        }
        "mode" => {
            cfg.mode = match value.trim() {
                "baseline" => RunMode::Baseline,
                "battery" => RunMode::Battery,
                "both" => RunMode::Both,
                _ => return Err(bad(key, value)),
            }
        }
        "dt" => cfg.sim.dt = num!(f64),
        "duration" => cfg.sim.duration = num!(f64),
        "c_start" => {
            cfg.sim.c_start = match value.trim() {
                "inf" | "+inf" => f64::INFINITY,
                v => v.parse().map_err(|_| bad(key, value))?,
            }
        }
        "module_length" => cfg.sim.module_length = num!(f64),
        "module_mass" => cfg.sim.module_mass = num!(f64),
        "beta" => cfg.sim.beta = num!(f64),
        "kappa" => cfg.sim.kappa = num!(f64),
        "gamma_t" => cfg.sim.gamma_t = num!(f64),
        "gamma_r" => cfg.sim.gamma_r = num!(f64),
        "omega_ref" => cfg.sim.omega_ref = num!(f64),
        "rewrite_iterations" => cfg.rewrite.iterations = num!(u32),
        "max_string_length" => cfg.rewrite.max_string_length = num!(usize),
        "max_joints" => cfg.limits.max_joints = num!(usize),
        "max_bricks" => cfg.limits.max_bricks = num!(usize),
        "repetitions" => cfg.repetitions = num!(u32),
        "out_dir" => cfg.out_dir = PathBuf::from(value.trim()),
        _ => return Err(ConfigError::UnknownKey(key.to_string())),
    }
    Ok(())
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    cfg.evolution
        .validate()
        .map_err(|e| range_err("evolution", e.to_string()))?;
    cfg.sim
        .validate()
        .map_err(|e| range_err("sim", e.to_string()))?;
    if cfg.rewrite.iterations < 1 {
        return Err(range_err("rewrite_iterations", "must be at least 1"));
    }
    if cfg.rewrite.max_string_length < 1 {
        return Err(range_err("max_string_length", "must be at least 1"));
    }
    if cfg.repetitions < 1 {
        return Err(range_err("repetitions", "must be at least 1"));
    }
    Ok(())
}

/// Parses `key = value` text (with `#` comments) on top of the defaults.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: line.to_string(),
        })?;
        set_key(&mut cfg, key.trim(), value)?;
    }
    for (key, value) in overrides {
        set_key(&mut cfg, key.trim(), value)?;
    }
    validate(&cfg)?;
    Ok(cfg)
}

/// Loads a config file; command-line overrides are applied last.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, overrides)
}
