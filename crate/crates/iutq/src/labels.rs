//! Ground-truth criticality labels.
//!
//! ```text
//! recording_id,ego_id,timestamp_ms,critical
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use iutq_core::AgentId;

use crate::error::{IoError, IoResult};

pub const LABEL_HEADER: [&str; 4] = ["recording_id", "ego_id", "timestamp_ms", "critical"];

/// Identifies one (scene, ego) pair across recordings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelKey {
    pub recording_id: String,
    pub ego: AgentId,
    pub timestamp_ms: i64,
}

impl LabelKey {
    pub fn new(recording_id: impl Into<String>, ego: AgentId, timestamp_ms: i64) -> Self {
        LabelKey { recording_id: recording_id.into(), ego, timestamp_ms }
    }
}

impl fmt::Display for LabelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ego {}, {} ms)", self.recording_id, self.ego, self.timestamp_ms)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelTable {
    pub labels: BTreeMap<LabelKey, bool>,
}

impl LabelTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.values().filter(|c| **c).count()
    }

    /// `None` for an empty table.
    pub fn positive_rate(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.positives() as f64 / self.len() as f64)
    }
}

pub fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

pub fn load_labels(path: impl AsRef<Path>) -> IoResult<LabelTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    read_labels(file, path)
}

/// Unlike track files, any malformed label row is an error.
pub fn read_labels<R: Read>(reader: R, origin: &Path) -> IoResult<LabelTable> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| IoError::csv(origin, e))?.clone();
    let mut columns = [0usize; 4];
    for (slot, name) in columns.iter_mut().zip(LABEL_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::format(origin, format!("missing column {name}")))?;
    }
    let mut table = LabelTable::default();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| IoError::csv(origin, e))?;
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let bad = |i: usize| {
            IoError::format(origin, format!("row {}: invalid {}: {:?}", line + 2, LABEL_HEADER[i], field(i)))
        };
        let ego = field(1).parse::<u64>().map_err(|_| bad(1))?;
        let timestamp_ms = field(2).parse::<i64>().map_err(|_| bad(2))?;
        let critical = parse_bool(field(3)).ok_or_else(|| bad(3))?;
        let key = LabelKey::new(field(0), AgentId(ego), timestamp_ms);
        if table.labels.insert(key.clone(), critical).is_some() {
            return Err(IoError::DuplicateLabel { path: origin.into(), key });
        }
    }
    Ok(table)
}
