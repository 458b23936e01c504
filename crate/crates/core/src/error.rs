use alloc::string::String;
use core::fmt;

use crate::scene::AgentId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The agent is not present in the scene or recording that was queried.
    MissingAgent {
        agent: AgentId,
        timestamp_ms: Option<i64>,
    },
    EmptyScene {
        timestamp_ms: i64,
    },
    DuplicateAgent {
        agent: AgentId,
        timestamp_ms: i64,
    },
    TimestampMismatch {
        agent: AgentId,
        expected_ms: i64,
        found_ms: i64,
    },
    /// Frames must be strictly increasing and aligned to the frame interval.
    FrameOrder {
        previous_ms: i64,
        next_ms: i64,
    },
    InvalidFrameInterval(i64),
    InvalidConfig(&'static str),
    InvalidSpec(String),
    UnsupportedMetric(String),
    EmptyCounts,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MissingAgent { agent, timestamp_ms: Some(t) } => {
                write!(f, "agent {agent} is not present at {t} ms")
            }
            Error::MissingAgent { agent, timestamp_ms: None } => {
                write!(f, "agent {agent} does not appear in the recording")
            }
            Error::EmptyScene { timestamp_ms } => write!(f, "scene at {timestamp_ms} ms has no agents"),
            Error::DuplicateAgent { agent, timestamp_ms } => {
                write!(f, "agent {agent} appears twice in the scene at {timestamp_ms} ms")
            }
            Error::TimestampMismatch { agent, expected_ms, found_ms } => {
                write!(f, "agent {agent} carries timestamp {found_ms} ms inside the scene at {expected_ms} ms")
            }
            Error::FrameOrder { previous_ms, next_ms } => {
                write!(f, "frame at {next_ms} ms does not follow {previous_ms} ms on the frame grid")
            }
            Error::InvalidFrameInterval(ms) => write!(f, "invalid frame interval {ms} ms"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::InvalidSpec(what) => write!(f, "invalid scene specification: {what}"),
            Error::UnsupportedMetric(id) => write!(f, "no reference implementation for metric `{id}`"),
            Error::EmptyCounts => f.write_str("confusion counts are all zero"),
        }
    }
}

impl core::error::Error for Error {}
