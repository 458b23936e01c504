//! File formats, batch scoring and evaluation around [`iutq_core`].
//!
//! The core crate does the arithmetic; this crate reads track and label
//! files, fans scoring out over recordings and frames, and writes score
//! files, reports and run manifests.

#![forbid(unsafe_code)]

pub mod cli;
pub mod error;
pub mod format;
pub mod ingest;
pub mod labels;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod scores;

pub use iutq_core;

pub use error::{IoError, IoResult};
pub use ingest::{load_trackfile, write_trackfile, IngestReport, LoadOptions};
pub use labels::{load_labels, LabelKey, LabelTable};
pub use manifest::RunManifest;
pub use pipeline::{score_recordings, Recording, ScoreOptions};
pub use scores::ScoreRow;
