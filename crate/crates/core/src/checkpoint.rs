//! Stage checkpoints: one canonical-text file per polynomial plus JSON side files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{PolyError, RatExpr, SparsePoly};

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("missing checkpoint {0}")]
    Missing(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("corrupt checkpoint {path}: {source}")]
    Parse { path: String, source: PolyError },
    #[error("corrupt checkpoint {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// Directory of checkpoint files; `None` disables persistence.
#[derive(Clone, Debug, Default)]
pub struct Store {
    dir: Option<PathBuf>,
}

impl Store {
    pub fn new(dir: Option<PathBuf>) -> Store {
        Store { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn has(&self, name: &str) -> bool {
        self.path(name).is_some_and(|p| p.exists())
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), CheckpointError> {
        let Some(path) = self.path(name) else { return Ok(()) };
        let io_err = |source| CheckpointError::Io { path: path.display().to_string(), source };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err)?;
        }
        // Write then rename so an interrupted run never leaves a truncated file.
        let tmp = path.with_extension("partial");
        fs::write(&tmp, text).map_err(io_err)?;
        fs::rename(&tmp, &path).map_err(io_err)
    }

    pub fn read_text(&self, name: &str) -> Result<String, CheckpointError> {
        let path = self.path(name).ok_or_else(|| CheckpointError::Missing(name.to_string()))?;
        if !path.exists() {
            return Err(CheckpointError::Missing(name.to_string()));
        }
        fs::read_to_string(&path).map_err(|source| CheckpointError::Io { path: path.display().to_string(), source })
    }

    pub fn write_poly(&self, name: &str, p: &SparsePoly) -> Result<(), CheckpointError> {
        self.write_text(&format!("{name}.poly"), &format!("{p}\n"))
    }

    pub fn read_poly(&self, name: &str) -> Result<SparsePoly, CheckpointError> {
        let file = format!("{name}.poly");
        let text = self.read_text(&file)?;
        text.trim_end().parse().map_err(|source| CheckpointError::Parse { path: file, source })
    }

    pub fn write_ratexpr(&self, name: &str, e: &RatExpr) -> Result<(), CheckpointError> {
        self.write_poly(&format!("{name}.num"), e.num())?;
        self.write_poly(&format!("{name}.den"), e.den())
    }

    pub fn read_ratexpr(&self, name: &str) -> Result<RatExpr, CheckpointError> {
        let num = self.read_poly(&format!("{name}.num"))?;
        let den = self.read_poly(&format!("{name}.den"))?;
        RatExpr::new(num, den).map_err(|source| CheckpointError::Parse { path: name.to_string(), source })
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CheckpointError> {
        let text = serde_json::to_string_pretty(value).expect("serializable checkpoint");
        self.write_text(name, &(text + "\n"))
    }

    pub fn read_json<T: DeserializeOwned>(&self, name: &str) -> Result<T, CheckpointError> {
        let text = self.read_text(name)?;
        serde_json::from_str(&text).map_err(|source| CheckpointError::Json { path: name.to_string(), source })
    }
}
