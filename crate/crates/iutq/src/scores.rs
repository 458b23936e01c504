//! Long-format score files, one row per (recording, timestamp, ego, metric).
//!
//! ```text
//! recording_id,timestamp_ms,ego_id,metric_id,value,critical
//! ```
//!
//! Undefined values are empty fields; `critical` is `0` or `1`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use iutq_core::{AgentId, MetricId, MetricRow};

use crate::error::{IoError, IoResult};
use crate::format::opt_sig6;
use crate::labels::{parse_bool, LabelKey};

pub const SCORE_HEADER: [&str; 6] = ["recording_id", "timestamp_ms", "ego_id", "metric_id", "value", "critical"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub recording_id: Arc<str>,
    pub timestamp_ms: i64,
    pub ego: AgentId,
    pub metric: MetricId,
    pub value: Option<f64>,
    pub critical: bool,
}

impl ScoreRow {
    pub fn from_metric_row(recording_id: &Arc<str>, row: &MetricRow) -> Self {
        ScoreRow {
            recording_id: Arc::clone(recording_id),
            timestamp_ms: row.timestamp_ms,
            ego: row.ego,
            metric: row.metric,
            value: row.value,
            critical: row.critical,
        }
    }

    pub fn key(&self) -> LabelKey {
        LabelKey::new(&*self.recording_id, self.ego, self.timestamp_ms)
    }
}

pub fn write_score_file(path: impl AsRef<Path>, rows: &[ScoreRow]) -> IoResult<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    write_scores(BufWriter::new(file), rows, path)
}

pub fn write_scores<W: Write>(writer: W, rows: &[ScoreRow], origin: &Path) -> IoResult<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(SCORE_HEADER).map_err(|e| IoError::csv(origin, e))?;
    for r in rows {
        out.write_record([
            &*r.recording_id,
            &r.timestamp_ms.to_string(),
            &r.ego.to_string(),
            r.metric.as_str(),
            &opt_sig6(r.value),
            if r.critical { "1" } else { "0" },
        ])
        .map_err(|e| IoError::csv(origin, e))?;
    }
    out.flush().map_err(|e| IoError::file(origin, e))
}

pub fn load_score_file(path: impl AsRef<Path>) -> IoResult<Vec<ScoreRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    read_scores(file, path)
}

pub fn read_scores<R: Read>(reader: R, origin: &Path) -> IoResult<Vec<ScoreRow>> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| IoError::csv(origin, e))?.clone();
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(SCORE_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::format(origin, format!("missing column {name}")))?;
    }
    let mut rows = Vec::new();
    let mut ids: BTreeMap<String, Arc<str>> = BTreeMap::new();
    for (line, record) in csv.records().enumerate() {
        let record = record.map_err(|e| IoError::csv(origin, e))?;
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let bad = |i: usize| {
            IoError::format(origin, format!("row {}: invalid {}: {:?}", line + 2, SCORE_HEADER[i], field(i)))
        };
        let recording_id = ids.entry(field(0).to_string()).or_insert_with(|| field(0).into()).clone();
        let value = match field(4) {
            "" => None,
            v => Some(v.parse::<f64>().map_err(|_| bad(4))?),
        };
        rows.push(ScoreRow {
            recording_id,
            timestamp_ms: field(1).parse().map_err(|_| bad(1))?,
            ego: AgentId(field(2).parse().map_err(|_| bad(2))?),
            metric: field(3).parse().map_err(|_| bad(3))?,
            value,
            critical: parse_bool(field(5)).ok_or_else(|| bad(5))?,
        });
    }
    Ok(rows)
}

/// Criticality flags grouped by metric.
pub fn flags_by_metric(rows: &[ScoreRow]) -> BTreeMap<MetricId, BTreeMap<LabelKey, bool>> {
    let mut out: BTreeMap<MetricId, BTreeMap<LabelKey, bool>> = BTreeMap::new();
    for r in rows {
        out.entry(r.metric).or_default().insert(r.key(), r.critical);
    }
    out
}
