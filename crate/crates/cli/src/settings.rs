//! Option resolution: command-line flag, then config file, then default.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

/// Invalid input or usage; maps to exit status 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

#[derive(Debug, Default)]
pub struct Settings {
    values: Map<String, Value>,
    source: Option<PathBuf>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else { return Ok(Settings::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(values)) => Ok(Settings {
                values,
                source: Some(path.to_path_buf()),
            }),
            Ok(_) => Err(invalid(format!("config {} must be a JSON object", path.display()))),
            Err(e) => Err(invalid(format!("config {}: {e}", path.display()))),
        }
    }

    fn lookup<T: DeserializeOwned>(&self, key: &str) -> anyhow::Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| {
                let src = self.source.as_deref().map_or("config".into(), |p| p.display().to_string());
                invalid(format!("{src}: key `{key}`: {e}"))
            }),
        }
    }

    pub fn opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> anyhow::Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.lookup(key),
        }
    }

    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> anyhow::Result<T> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    /// A switch is on when given on the command line or set true in the config.
    pub fn switch(&self, flag: bool, key: &str) -> anyhow::Result<bool> {
        Ok(flag || self.lookup::<bool>(key)?.unwrap_or(false))
    }
}
