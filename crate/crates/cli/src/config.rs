//! The project configuration file: which contracts to mutate, how to build
//! and test them, and which operators and equivalent mutants apply.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sumo_core::operators::{operator_info, CATALOG};
use thiserror::Error;

fn default_project_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_contracts_glob() -> String {
    "contracts/**/*.sol".to_string()
}

fn default_timeout_seconds() -> u64 {
    300
}

fn default_parallelism() -> usize {
    1
}

fn default_work_dir() -> String {
    ".sumo".to_string()
}

fn default_log_truncate_bytes() -> usize {
    100_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_project_dir")]
    pub project_dir: PathBuf,
    #[serde(default = "default_contracts_glob")]
    pub contracts_glob: String,
    /// Glob patterns excluded from mutation (libraries, migrations).
    #[serde(default)]
    pub skip_contracts: Vec<String>,
    #[serde(default)]
    pub compile_command: String,
    #[serde(default)]
    pub test_command: String,
    #[serde(default = "default_timeout_seconds")]
    pub timeout_seconds: u64,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Per-operator enable flags; ids absent from the map stay enabled.
    #[serde(default)]
    pub operators: BTreeMap<String, bool>,
    /// Live mutant ids reviewed by hand and judged behavior-preserving.
    #[serde(default)]
    pub equivalent_mutants: Vec<String>,
    #[serde(default = "default_work_dir")]
    pub work_dir: String,
    #[serde(default = "default_log_truncate_bytes")]
    pub log_truncate_bytes: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            project_dir: default_project_dir(),
            contracts_glob: default_contracts_glob(),
            skip_contracts: Vec::new(),
            compile_command: String::new(),
            test_command: String::new(),
            timeout_seconds: default_timeout_seconds(),
            parallelism: default_parallelism(),
            operators: BTreeMap::new(),
            equivalent_mutants: Vec::new(),
            work_dir: default_work_dir(),
            log_truncate_bytes: default_log_truncate_bytes(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("unknown operator id in config: {0}")]
    UnknownOperator(String),
    #[error("{0}")]
    Invalid(String),
    #[error("cannot write {path}: {source}")]
    Save {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Config {
    /// Loads and validates the file; a missing file yields the defaults so
    /// commands that need no project setup still work.
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(err) if err.kind() == io::ErrorKind::NotFound => {
                let config = Config::default();
                config.validate()?;
                return Ok(config);
            }
            Err(err) => {
                return Err(ConfigError::Io {
                    path: path.to_path_buf(),
                    source: err,
                })
            }
        };
        let config: Config = toml::from_str(&text).map_err(|err| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(err),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        let text = toml::to_string_pretty(self).expect("config serializes");
        fs::write(path, text).map_err(|err| ConfigError::Save {
            path: path.to_path_buf(),
            source: err,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for id in self.operators.keys() {
            if operator_info(id).is_none() {
                return Err(ConfigError::UnknownOperator(id.clone()));
            }
        }
        if self.timeout_seconds == 0 {
            return Err(ConfigError::Invalid(
                "timeoutSeconds must be at least 1".to_string(),
            ));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::Invalid(
                "parallelism must be at least 1".to_string(),
            ));
        }
        Ok(())
    }

    /// Commands that spawn the pipeline need both commands configured.
    pub fn require_commands(&self) -> Result<(), ConfigError> {
        if self.compile_command.trim().is_empty() {
            return Err(ConfigError::Invalid(
                "compileCommand must be set to run a campaign".to_string(),
            ));
        }
        if self.test_command.trim().is_empty() {
            return Err(ConfigError::Invalid(
                "testCommand must be set to run a campaign".to_string(),
            ));
        }
        Ok(())
    }

    pub fn operator_enabled(&self, id: &str) -> bool {
        self.operators.get(id).copied().unwrap_or(true)
    }

    pub fn enabled_operators(&self) -> BTreeSet<String> {
        CATALOG
            .iter()
            .filter(|info| self.operator_enabled(info.id))
            .map(|info| info.id.to_string())
            .collect()
    }

    pub fn equivalent_ids(&self) -> BTreeSet<String> {
        self.equivalent_mutants.iter().cloned().collect()
    }

    pub fn work_dir_path(&self) -> PathBuf {
        let work = Path::new(&self.work_dir);
        if work.is_absolute() {
            work.to_path_buf()
        } else {
            self.project_dir.join(work)
        }
    }
}

/// Flips the named operators on or off and persists the file, creating it
/// with defaults when missing.
pub fn set_operator_flags(path: &Path, ids: &[String], enabled: bool) -> Result<(), ConfigError> {
    let mut config = Config::load(path)?;
    for id in ids {
        let info = operator_info(id).ok_or_else(|| ConfigError::UnknownOperator(id.clone()))?;
        config.operators.insert(info.id.to_string(), enabled);
    }
    config.save(path)
}
