//! Track files in the INTERACTION column layout.
//!
//! ```text
//! track_id,frame_id,timestamp_ms,agent_type,x,y,vx,vy,psi_rad,length,width
//! ```
//!
//! Columns are matched by header name. Rows that fail validation are
//! dropped and counted rather than aborting the load.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use iutq_core::geometry::Vec2;
use iutq_core::{AgentState, AgentType, ScenarioTrackset};
use log::debug;

use crate::error::{IoError, IoResult};

pub const TRACK_HEADER: [&str; 11] =
    ["track_id", "frame_id", "timestamp_ms", "agent_type", "x", "y", "vx", "vy", "psi_rad", "length", "width"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub frame_interval_ms: i64,
    /// Keep pedestrians, bicycles and unknown types. Off by default.
    pub include_other: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { frame_interval_ms: 100, include_other: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub rows_read: usize,
    /// Rows that failed validation.
    pub rows_dropped: usize,
    /// Valid rows removed by the agent type filter.
    pub rows_filtered: usize,
    pub agents: usize,
    pub frames: usize,
    pub duration_ms: i64,
}

pub fn load_trackfile(path: impl AsRef<Path>, options: &LoadOptions) -> IoResult<(ScenarioTrackset, IngestReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::file(path, e))?;
    read_tracks(file, options, path)
}

/// Same as [`load_trackfile`] for any reader; `origin` only labels errors.
pub fn read_tracks<R: Read>(
    reader: R,
    options: &LoadOptions,
    origin: &Path,
) -> IoResult<(ScenarioTrackset, IngestReport)> {
    if options.frame_interval_ms <= 0 {
        return Err(IoError::format(
            origin,
            format!("frame interval must be positive, got {}", options.frame_interval_ms),
        ));
    }
    let mut csv = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(|e| IoError::csv(origin, e))?.clone();
    let mut columns = [0usize; 11];
    let mut missing = Vec::new();
    for (slot, name) in columns.iter_mut().zip(TRACK_HEADER) {
        match headers.iter().position(|h| h == name) {
            Some(i) => *slot = i,
            None => missing.push(name),
        }
    }
    if !missing.is_empty() {
        return Err(IoError::format(origin, format!("missing columns: {}", missing.join(", "))));
    }

    let mut report = IngestReport::default();
    let mut seen = BTreeSet::new();
    let mut states = Vec::new();
    for (line, record) in csv.records().enumerate() {
        report.rows_read += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) if !e.is_io_error() => {
                debug!("{}: row {}: {e}", origin.display(), line + 2);
                report.rows_dropped += 1;
                continue;
            }
            Err(e) => return Err(IoError::csv(origin, e)),
        };
        let field = |i: usize| record.get(columns[i]).unwrap_or("");
        let agent_type = AgentType::parse(field(3));
        let state = match parse_row(&field, agent_type, options.frame_interval_ms) {
            Ok(s) => s,
            Err(why) => {
                debug!("{}: row {}: {why}", origin.display(), line + 2);
                report.rows_dropped += 1;
                continue;
            }
        };
        if !seen.insert((state.id, state.timestamp_ms)) {
            debug!("{}: row {}: duplicate track and timestamp", origin.display(), line + 2);
            report.rows_dropped += 1;
            continue;
        }
        if !options.include_other && !agent_type.is_vehicle() {
            report.rows_filtered += 1;
            continue;
        }
        states.push(state);
    }
    if states.is_empty() {
        return Err(IoError::EmptyRecording { path: origin.into() });
    }
    let ts = ScenarioTrackset::from_states(options.frame_interval_ms, states)
        .map_err(|source| IoError::Core { path: origin.into(), source })?;
    report.agents = ts.agent_count();
    report.frames = ts.frames().len();
    report.duration_ms = ts.duration_ms();
    Ok((ts, report))
}

fn parse_row<'a>(
    field: &impl Fn(usize) -> &'a str,
    agent_type: AgentType,
    interval: i64,
) -> Result<AgentState, String> {
    let int =
        |i: usize| field(i).parse::<i64>().map_err(|_| format!("{}: not an integer: {:?}", TRACK_HEADER[i], field(i)));
    let num = |i: usize| match field(i).parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{}: not a finite number: {:?}", TRACK_HEADER[i], field(i))),
    };
    let id = int(0)?;
    let frame = int(1)?;
    let t = int(2)?;
    if id < 0 {
        return Err(format!("negative track id {id}"));
    }
    if frame.checked_mul(interval) != Some(t) {
        return Err(format!("timestamp {t} ms does not match frame {frame}"));
    }
    let velocity = Vec2::new(num(6)?, num(7)?);
    // heading and outline are optional (the dataset leaves them empty for
    // pedestrians); a missing heading follows the velocity
    let heading = if field(8).is_empty() { velocity.y.atan2(velocity.x) } else { num(8)? };
    let mut state = AgentState::new(id as u64, t, Vec2::new(num(4)?, num(5)?), velocity, heading).with_type(agent_type);
    if !(field(9).is_empty() && field(10).is_empty()) {
        let (l, w) = (num(9)?, num(10)?);
        state = state.with_footprint(l, w);
        if state.footprint.is_none() {
            return Err(format!("invalid outline {l} x {w}"));
        }
    }
    Ok(state)
}

pub fn write_trackfile(path: impl AsRef<Path>, ts: &ScenarioTrackset) -> IoResult<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::file(path, e))?;
    write_tracks(file, ts, path)
}

/// Writes every state of the trackset, frame by frame. Floats use the
/// shortest representation that parses back to the same bits.
pub fn write_tracks<W: Write>(writer: W, ts: &ScenarioTrackset, origin: &Path) -> IoResult<()> {
    let interval = ts.frame_interval_ms();
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(TRACK_HEADER).map_err(|e| IoError::csv(origin, e))?;
    for scene in ts.frames() {
        let t = scene.timestamp_ms();
        if t % interval != 0 {
            return Err(IoError::format(origin, format!("timestamp {t} ms is not a whole frame of {interval} ms")));
        }
        for a in scene.agents() {
            let (l, w) =
                a.footprint.map_or((String::new(), String::new()), |f| (f.length.to_string(), f.width.to_string()));
            let row = [
                a.id.0.to_string(),
                (t / interval).to_string(),
                t.to_string(),
                a.agent_type.as_str().to_string(),
                a.position.x.to_string(),
                a.position.y.to_string(),
                a.velocity.x.to_string(),
                a.velocity.y.to_string(),
                a.heading.to_string(),
                l,
                w,
            ];
            out.write_record(&row).map_err(|e| IoError::csv(origin, e))?;
        }
    }
    out.flush().map_err(|e| IoError::file(origin, e))
}
