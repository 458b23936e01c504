//! Run manifests: everything needed to repeat a scoring run.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use iutq_core::{IutqConfig, SurrogateConfig};
use serde::{Deserialize, Serialize};

use crate::error::{IoError, IoResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    pub workers: usize,
    pub metrics: Vec<String>,
    pub frame_interval_ms: i64,
    pub include_other: bool,
    pub strict: bool,
    pub iutq: IutqConfig,
    pub surrogate: SurrogateConfig,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> IoResult<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| IoError::file(path, e))?;
        serde_json::from_reader(BufReader::new(file)).map_err(|e| IoError::format(path, e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> IoResult<()> {
        let path = path.as_ref();
        let mut file = File::create(path).map_err(|e| IoError::file(path, e))?;
        serde_json::to_writer_pretty(&mut file, self).map_err(|e| IoError::format(path, e.to_string()))?;
        file.write_all(b"\n").map_err(|e| IoError::file(path, e))
    }
}
