//! Strict TOML experiment configs.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::harness::ExperimentSpec;

pub const FORMAT_VERSION: u32 = 1;

/// A base experiment and its GeN counterpart, by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparePair {
    pub base: String,
    pub gen: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub experiments: Vec<ExperimentSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compare: Vec<ComparePair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigErrorCode {
    Read,
    Parse,
    UnknownKey,
    Version,
    Empty,
    DuplicateName,
    Invalid,
    Pair,
}

impl ConfigErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigErrorCode::Read => "E_CONFIG_READ",
            ConfigErrorCode::Parse => "E_CONFIG_PARSE",
            ConfigErrorCode::UnknownKey => "E_CONFIG_UNKNOWN_KEY",
            ConfigErrorCode::Version => "E_CONFIG_VERSION",
            ConfigErrorCode::Empty => "E_CONFIG_EMPTY",
            ConfigErrorCode::DuplicateName => "E_CONFIG_DUPLICATE_NAME",
            ConfigErrorCode::Invalid => "E_CONFIG_INVALID",
            ConfigErrorCode::Pair => "E_CONFIG_PAIR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub code: ConfigErrorCode,
    pub message: String,
}

impl ConfigError {
    fn new(code: ConfigErrorCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.message)
    }
}

impl std::error::Error for ConfigError {}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')) && !name.starts_with('.')
}

impl Config {
    /// Parses and validates. Unknown keys anywhere are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Config = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let code = if msg.contains("unknown field") || msg.contains("unknown variant") {
                ConfigErrorCode::UnknownKey
            } else {
                ConfigErrorCode::Parse
            };
            ConfigError::new(code, one_line(&e.to_string()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(ConfigErrorCode::Read, format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.format_version != FORMAT_VERSION {
            return Err(ConfigError::new(
                ConfigErrorCode::Version,
                format!("format_version {} is not supported (expected {FORMAT_VERSION})", self.format_version),
            ));
        }
        if self.experiments.is_empty() {
            return Err(ConfigError::new(ConfigErrorCode::Empty, "no experiments"));
        }
        let mut seen = HashSet::new();
        for exp in &self.experiments {
            if !valid_name(&exp.name) {
                return Err(ConfigError::new(
                    ConfigErrorCode::Invalid,
                    format!("experiment name `{}` must use only ASCII letters, digits, `_`, `-`, `.`", exp.name),
                ));
            }
            if !seen.insert(exp.name.as_str()) {
                return Err(ConfigError::new(
                    ConfigErrorCode::DuplicateName,
                    format!("experiment name `{}` appears more than once", exp.name),
                ));
            }
            exp.validate().map_err(|e| ConfigError::new(ConfigErrorCode::Invalid, one_line(&e.to_string())))?;
        }
        for pair in &self.compare {
            for name in [&pair.base, &pair.gen] {
                if self.experiment(name).is_none() {
                    return Err(ConfigError::new(
                        ConfigErrorCode::Pair,
                        format!("compare pair names unknown experiment `{name}`"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentSpec> {
        self.experiments.iter().find(|e| e.name == name)
    }

    /// Every experiment seed replaced by `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for exp in &mut self.experiments {
            exp.seed = seed;
        }
        self
    }

    /// Checks the extra requirements of compare mode and returns the
    /// experiments in column order: each pair contributes base then GeN.
    pub fn compare_experiments(&self) -> Result<Vec<ExperimentSpec>, ConfigError> {
        let pair_err = |msg: String| Err(ConfigError::new(ConfigErrorCode::Pair, msg));
        if self.compare.is_empty() {
            return pair_err("compare mode needs at least one [[compare]] pair".into());
        }
        let mut used = HashSet::new();
        let mut out = Vec::new();
        let iterations = self.experiment(&self.compare[0].base).map(|e| e.iterations);
        for pair in &self.compare {
            let (Some(base), Some(gen)) = (self.experiment(&pair.base), self.experiment(&pair.gen)) else {
                return pair_err("compare pair names an unknown experiment".into());
            };
            if base.gen.is_some() {
                return pair_err(format!("`{}` is listed as a base but uses GeN", base.name));
            }
            if gen.gen.is_none() {
                return pair_err(format!("`{}` is listed as a GeN variant but has no [gen] table", gen.name));
            }
            if base.problem != gen.problem || base.optimizer.name() != gen.optimizer.name() {
                return pair_err(format!("`{}` and `{}` differ in problem or optimizer kind", base.name, gen.name));
            }
            for exp in [base, gen] {
                if Some(exp.iterations) != iterations {
                    return pair_err("all compared experiments need the same iteration count".into());
                }
                if !used.insert(exp.name.clone()) {
                    return pair_err(format!("`{}` appears in more than one pair", exp.name));
                }
                let mut exp = exp.clone();
                exp.log_every = 1;
                out.push(exp);
            }
        }
        if let Some(orphan) = self.experiments.iter().find(|e| !used.contains(&e.name)) {
            return pair_err(format!("experiment `{}` has no compare pair", orphan.name));
        }
        Ok(out)
    }
}
