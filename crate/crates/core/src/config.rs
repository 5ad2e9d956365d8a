//! Key-value run configuration.
//!
//! Plain `key = value` lines, `#` comments. Hyperparameters resolve
//! per-phase first (`phase3.random_action_decay = 0.999995`), then globally
//! (`gamma = 0.95`), then fall back to the built-in per-phase defaults.
//! Hamiltonian coefficients are selected by `J.mode = diagonal|uniform|file`
//! and `B.mode = ones|file`, with file matrices given as whitespace-separated
//! numbers (row-major), resolved relative to the config file.

use crate::cube::Phase;
use crate::ddqn::{PhaseConfig, StepRule};
use crate::hamiltonian::{CoefficientError, CoefficientSet, Coupling};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Parse { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: expected {want}, got `{got}`")]
    BadValue {
        key: String,
        want: &'static str,
        got: String,
    },
    #[error("key `{key}` needs a file, but none was given")]
    MissingFile { key: String },
    #[error("coefficient file {path}: {detail}")]
    BadMatrix { path: String, detail: String },
    #[error(transparent)]
    Coefficient(#[from] CoefficientError),
}

const PHASE_KEYS: &[&str] = &[
    "learning_rate",
    "random_action_decay",
    "premium",
    "target_update",
    "batch_size",
    "memory_size",
    "step_rule",
    "scramble_min",
    "scramble_max",
    "gamma",
    "epsilon_floor",
    "window",
    "episodes",
    "train_every",
];

const COEFF_KEYS: &[&str] = &[
    "J.mode",
    "B.mode",
    "J.edge_spin_file",
    "J.corner_spin_file",
    "J.edge_position_file",
    "J.corner_position_file",
    "B.edge_spin_file",
    "B.corner_spin_file",
    "B.edge_position_file",
    "B.corner_position_file",
];

fn known_key(key: &str) -> bool {
    if COEFF_KEYS.contains(&key) || PHASE_KEYS.contains(&key) {
        return true;
    }
    if let Some(rest) = key.strip_prefix("phase") {
        if let Some((idx, name)) = rest.split_once('.') {
            return matches!(idx, "1" | "2" | "3" | "4") && PHASE_KEYS.contains(&name);
        }
    }
    false
}

/// Parsed configuration plus the directory used to resolve file references.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn empty() -> Self {
        RunConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = RunConfig {
            values: BTreeMap::new(),
            base_dir: path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let key = key.trim().to_string();
            if !known_key(&key) {
                return Err(ConfigError::UnknownKey(key));
            }
            cfg.values.insert(key, value.trim().to_string());
        }
        Ok(cfg)
    }

    /// Inserts an override programmatically (used by tests and the CLI).
    pub fn set(&mut self, key: &str, value: &str) {
        assert!(known_key(key), "unknown config key {key}");
        self.values.insert(key.to_string(), value.to_string());
    }

    fn lookup(&self, phase: Phase, name: &str) -> Option<String> {
        let scoped = format!("phase{}.{}", phase.index(), name);
        self.values
            .get(&scoped)
            .or_else(|| self.values.get(name))
            .cloned()
    }

    fn f64_for(&self, phase: Phase, name: &str, default: f64) -> Result<f64, ConfigError> {
        match self.lookup(phase, name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: name.to_string(),
                want: "a number",
                got: v,
            }),
        }
    }

    fn usize_for(&self, phase: Phase, name: &str, default: usize) -> Result<usize, ConfigError> {
        match self.lookup(phase, name) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: name.to_string(),
                want: "an integer",
                got: v,
            }),
        }
    }

    /// The effective configuration for one phase: built-in defaults with any
    /// file overrides applied.
    pub fn phase_config(&self, phase: Phase) -> Result<PhaseConfig, ConfigError> {
        let d = PhaseConfig::defaults(phase);
        let step_rule = match self.lookup(phase, "step_rule") {
            None => d.step_rule,
            Some(v) => parse_step_rule(&v)?,
        };
        let cfg = PhaseConfig {
            phase,
            dims: d.dims,
            learning_rate: self.f64_for(phase, "learning_rate", d.learning_rate)?,
            random_action_decay: self.f64_for(
                phase,
                "random_action_decay",
                d.random_action_decay,
            )?,
            premium: self.f64_for(phase, "premium", d.premium)?,
            target_update: self.usize_for(phase, "target_update", d.target_update)?,
            batch_size: self.usize_for(phase, "batch_size", d.batch_size)?,
            memory_size: self.usize_for(phase, "memory_size", d.memory_size)?,
            step_rule,
            scramble_min: self.usize_for(phase, "scramble_min", d.scramble_min)?,
            scramble_max: self.usize_for(phase, "scramble_max", d.scramble_max)?,
            gamma: self.f64_for(phase, "gamma", d.gamma)?,
            epsilon_floor: self.f64_for(phase, "epsilon_floor", d.epsilon_floor)?,
            window: self.usize_for(phase, "window", d.window)?,
            episodes: self.usize_for(phase, "episodes", d.episodes)?,
            train_every: self.usize_for(phase, "train_every", d.train_every)?.max(1),
        };
        Ok(cfg)
    }

    /// Builds the Hamiltonian coefficients from the `J.*`/`B.*` keys.
    pub fn coefficient_set(&self) -> Result<CoefficientSet, ConfigError> {
        let mut coeffs = CoefficientSet::default();
        match self.values.get("J.mode").map(String::as_str) {
            None | Some("diagonal") => {}
            Some("uniform") => {
                coeffs = CoefficientSet::uniform();
            }
            Some("file") => {
                coeffs.j_edge_spin = self.coupling_from("J.edge_spin_file", "edge spin", 12)?;
                coeffs.j_corner_spin =
                    self.coupling_from("J.corner_spin_file", "corner spin", 8)?;
                coeffs.j_edge_pos =
                    self.coupling_from("J.edge_position_file", "edge position", 12)?;
                coeffs.j_corner_pos =
                    self.coupling_from("J.corner_position_file", "corner position", 8)?;
            }
            Some(other) => {
                return Err(ConfigError::BadValue {
                    key: "J.mode".into(),
                    want: "diagonal, uniform, or file",
                    got: other.to_string(),
                })
            }
        }
        match self.values.get("B.mode").map(String::as_str) {
            None | Some("ones") => {}
            Some("file") => {
                coeffs.b_edge_spin = self.numbers_from("B.edge_spin_file", 12)?;
                coeffs.b_corner_spin = self.numbers_from("B.corner_spin_file", 8)?;
                coeffs.b_edge_pos = self.numbers_from("B.edge_position_file", 36)?;
                coeffs.b_corner_pos = self.numbers_from("B.corner_position_file", 24)?;
            }
            Some(other) => {
                return Err(ConfigError::BadValue {
                    key: "B.mode".into(),
                    want: "ones or file",
                    got: other.to_string(),
                })
            }
        }
        coeffs.validate()?;
        Ok(coeffs)
    }

    fn numbers_from(&self, key: &str, want: usize) -> Result<Vec<f64>, ConfigError> {
        let rel = self
            .values
            .get(key)
            .ok_or_else(|| ConfigError::MissingFile {
                key: key.to_string(),
            })?;
        let path = self.base_dir.join(rel);
        let text = std::fs::read_to_string(&path)?;
        let nums: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse).collect();
        let nums = nums.map_err(|e| ConfigError::BadMatrix {
            path: path.display().to_string(),
            detail: format!("{e}"),
        })?;
        if nums.len() != want {
            return Err(ConfigError::BadMatrix {
                path: path.display().to_string(),
                detail: format!("expected {want} numbers, found {}", nums.len()),
            });
        }
        Ok(nums)
    }

    fn coupling_from(
        &self,
        key: &str,
        family: &'static str,
        n: usize,
    ) -> Result<Coupling, ConfigError> {
        let data = self.numbers_from(key, n * n)?;
        Ok(Coupling::from_rows(family, n, data)?)
    }
}

fn parse_step_rule(text: &str) -> Result<StepRule, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: "step_rule".into(),
        want: "scrambles+K or scrambles*K",
        got: text.to_string(),
    };
    if let Some(k) = text.strip_prefix("scrambles+") {
        return k.parse().map(StepRule::ScramblesPlus).map_err(|_| bad());
    }
    if let Some(k) = text.strip_prefix("scrambles*") {
        return k.parse().map(StepRule::ScramblesTimes).map_err(|_| bad());
    }
    Err(bad())
}
