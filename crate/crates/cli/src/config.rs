//! Optional TOML defaults. Flags win over `DOODLE_*` variables, which win
//! over the file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub store: Option<PathBuf>,
    pub budget_secs: Option<u64>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
}

pub const DEFAULT_FILE: &str = "doodle.toml";

impl Config {
    /// Reads `path`, or `doodle.toml` in the working directory if present.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let path = match path {
            Some(p) => p.to_path_buf(),
            None if Path::new(DEFAULT_FILE).exists() => PathBuf::from(DEFAULT_FILE),
            None => return Ok(Self::default()),
        };
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }
}
