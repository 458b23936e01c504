//! Parallel scoring over recordings, then frames.
//!
//! Workers only read shared tracksets and configuration. Results are
//! collected in input order, so output bytes never depend on scheduling.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use iutq_core::{FrameScorer, IutqConfig, MetricId, ScenarioTrackset, SurrogateConfig};
use rayon::prelude::*;

use crate::error::{IoError, IoResult};
use crate::ingest::{load_trackfile, IngestReport, LoadOptions};
use crate::scores::ScoreRow;

#[derive(Debug, Clone)]
pub struct Recording {
    /// File stem of the track file.
    pub id: Arc<str>,
    pub path: PathBuf,
    pub trackset: ScenarioTrackset,
    pub report: IngestReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreOptions {
    pub iutq: IutqConfig,
    pub surrogate: SurrogateConfig,
    pub metrics: Vec<MetricId>,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            iutq: IutqConfig::default(),
            surrogate: SurrogateConfig::default(),
            metrics: MetricId::ALL.to_vec(),
        }
    }
}

pub fn recording_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Expands directories to the `.csv` files directly inside them, sorted by
/// name. Plain file arguments are kept as given.
pub fn discover_inputs(inputs: &[PathBuf]) -> IoResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        let meta = fs::metadata(input).map_err(|e| IoError::file(input, e))?;
        if meta.is_dir() {
            let mut found = Vec::new();
            for entry in fs::read_dir(input).map_err(|e| IoError::file(input, e))? {
                let p = entry.map_err(|e| IoError::file(input, e))?.path();
                if p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                    found.push(p);
                }
            }
            found.sort();
            out.extend(found);
        } else {
            out.push(input.clone());
        }
    }
    Ok(out)
}

/// Loads every file concurrently. Failures are returned next to the
/// recordings that loaded, both in input order.
pub fn load_recordings(paths: &[PathBuf], options: &LoadOptions) -> (Vec<Recording>, Vec<IoError>) {
    let loaded: Vec<IoResult<Recording>> = paths
        .par_iter()
        .map(|p| {
            let (trackset, report) = load_trackfile(p, options)?;
            Ok(Recording { id: recording_id(p).into(), path: p.clone(), trackset, report })
        })
        .collect();
    let mut ids = BTreeSet::new();
    let mut recordings = Vec::new();
    let mut failures = Vec::new();
    for r in loaded {
        match r {
            Ok(rec) if !ids.insert(rec.id.clone()) => {
                failures
                    .push(IoError::format(&rec.path, format!("recording id {:?} is used by an earlier file", rec.id)));
            }
            Ok(rec) => recordings.push(rec),
            Err(e) => failures.push(e),
        }
    }
    (recordings, failures)
}

/// Rows ordered by timestamp, ego, then metric in request order.
pub fn score_recording(recording: &Recording, options: &ScoreOptions) -> IoResult<Vec<ScoreRow>> {
    let core = |source| IoError::Core { path: recording.path.clone(), source };
    let scorer =
        FrameScorer::new(&recording.trackset, options.iutq, options.surrogate, &options.metrics).map_err(core)?;
    let frames: Vec<_> = (0..scorer.frame_count())
        .into_par_iter()
        .map(|i| scorer.score_frame(i))
        .collect::<Result<_, _>>()
        .map_err(core)?;
    Ok(frames.iter().flatten().map(|row| ScoreRow::from_metric_row(&recording.id, row)).collect())
}

/// Scores all recordings concurrently, concatenated in recording order.
pub fn score_recordings(recordings: &[Recording], options: &ScoreOptions) -> IoResult<Vec<ScoreRow>> {
    let per: Vec<Vec<ScoreRow>> =
        recordings.par_iter().map(|r| score_recording(r, options)).collect::<IoResult<_>>()?;
    Ok(per.into_iter().flatten().collect())
}
