//! Criticality metrics for recorded urban traffic scenes.
//!
//! The crate scores every (scene, ego) pair of a recording with the inverse
//! universal traffic quality ([`iutq`]) and seven pairwise surrogate safety
//! measures ([`surrogate`]), and evaluates the resulting binary criticality
//! flags against labels ([`evaluation`]).
//!
//! Everything here is pure computation over immutable inputs and only needs
//! `alloc`. File formats, parallel batch scoring and the command line live in
//! the `iutq` companion crate.
#![no_std]
#![forbid(unsafe_code)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod batch;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod iutq;
pub(crate) mod math;
pub mod scene;
pub mod surrogate;
pub mod synth;

pub use batch::{FrameScorer, MetricId, MetricRow};
pub use error::{Error, Result};
pub use geometry::{Footprint, Vec2};
pub use iutq::{IutqBreakdown, IutqConfig, Penalty};
pub use scene::{AgentId, AgentState, AgentType, BrakingModel, ScenarioTrackset, Scene};
pub use surrogate::SurrogateConfig;
