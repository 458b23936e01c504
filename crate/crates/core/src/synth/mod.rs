//! Deterministic synthetic scenes and scenarios.
//!
//! Generators are pure functions of their spec: the same seed always gives
//! bitwise-identical output. The archetypes follow typical urban situations
//! (a fast ego passing standing traffic, queues, oncoming proximity, two
//! paths crossing at an intersection).

pub mod oracle;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Footprint, Vec2};
use crate::scene::{AgentState, AgentType, ScenarioTrackset, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedLaw {
    /// Every agent shares one randomly drawn speed.
    Uniform,
    /// Each agent is either slow (0 to 2 m/s) or fast (8 to 15 m/s).
    Bimodal,
    AllStanding,
    /// Agent 1 drives at 10 m/s, everyone else stands.
    OneFast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialLaw {
    /// Jittered square lattice filling the bounds.
    Grid,
    /// Two opposing lanes along the x axis.
    Corridor,
    /// Two perpendicular streams through the origin.
    Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    pub n_agents: usize,
    pub speed_law: SpeedLaw,
    pub spatial_law: SpatialLaw,
    /// Edge length of the square the agents are placed in, meters.
    pub bounds: f64,
}

impl SceneSpec {
    fn validate(&self) -> Result<()> {
        if self.n_agents == 0 {
            return Err(Error::InvalidSpec("a scene needs at least one agent".into()));
        }
        if !(self.bounds.is_finite() && self.bounds > 0.0) {
            return Err(Error::InvalidSpec(format!("bounds must be positive, got {}", self.bounds)));
        }
        Ok(())
    }
}

/// Builds one scene at timestamp 0 with agent ids `1..=n_agents`.
pub fn build_scene(spec: &SceneSpec) -> Result<Scene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_agents;
    let half = spec.bounds / 2.0;
    let shared_speed = rng.random_range(0.0..15.0);
    let side = libm::ceil(libm::sqrt(n as f64)).max(1.0) as usize;
    let pitch = spec.bounds / side as f64;

    let mut agents = Vec::with_capacity(n);
    for i in 0..n {
        let speed = match spec.speed_law {
            SpeedLaw::Uniform => shared_speed,
            SpeedLaw::Bimodal => {
                if rng.random_bool(0.5) {
                    rng.random_range(0.0..2.0)
                } else {
                    rng.random_range(8.0..15.0)
                }
            }
            SpeedLaw::AllStanding => 0.0,
            SpeedLaw::OneFast => {
                if i == 0 {
                    10.0
                } else {
                    0.0
                }
            }
        };
        let (position, heading) = match spec.spatial_law {
            SpatialLaw::Grid => {
                let (gx, gy) = ((i % side) as f64, (i / side) as f64);
                let jitter = Vec2::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)) * pitch;
                let p = Vec2::new(-half + (gx + 0.5) * pitch, -half + (gy + 0.5) * pitch) + jitter;
                (p, rng.random_range(-PI..PI))
            }
            SpatialLaw::Corridor => {
                let forward = rng.random_bool(0.5);
                let lane_y = if forward { -1.75 } else { 1.75 };
                let p = Vec2::new(rng.random_range(-half..half), lane_y + rng.random_range(-0.3..0.3));
                (p, if forward { 0.0 } else { PI })
            }
            SpatialLaw::Crossing => {
                let along = rng.random_range(-half..half);
                let offset = rng.random_range(-1.5..1.5);
                if i % 2 == 0 {
                    (Vec2::new(along, offset), if along < 0.0 { 0.0 } else { PI })
                } else {
                    (Vec2::new(offset, along), if along < 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 })
                }
            }
        };
        let truck = rng.random_bool(0.1);
        let (length, width) = if truck {
            (rng.random_range(8.0..12.0), rng.random_range(2.3..2.6))
        } else {
            (rng.random_range(3.8..5.2), rng.random_range(1.7..2.0))
        };
        let mut state = AgentState::new(i as u64 + 1, 0, position, Vec2::from_angle(heading) * speed, heading)
            .with_footprint(length, width);
        if truck {
            state = state.with_type(AgentType::TruckBus);
        }
        agents.push(state);
    }
    Scene::new(0, agents)
}

/// A recording that starts from [`build_scene`] and moves every agent along
/// its heading with a per-agent acceleration drawn from `[-1, 1]` m/s².
/// Speeds are clamped at zero, so braking agents come to a stop and stay.
pub fn build_recording(spec: &SceneSpec, n_frames: usize, frame_interval_ms: i64) -> Result<ScenarioTrackset> {
    if n_frames == 0 || frame_interval_ms <= 0 {
        return Err(Error::InvalidSpec("a recording needs frames and a positive interval".into()));
    }
    let start = build_scene(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x0005_eed0_f7ac);
    let dt = frame_interval_ms as f64 / 1000.0;
    let mut states = Vec::with_capacity(n_frames * start.len());
    for a in start.agents() {
        let accel = rng.random_range(-1.0..1.0);
        let dir = Vec2::from_angle(a.heading);
        let (mut pos, mut speed) = (a.position, a.speed());
        for k in 0..n_frames {
            let mut s = a.clone();
            s.timestamp_ms = k as i64 * frame_interval_ms;
            s.position = pos;
            s.velocity = dir * speed;
            states.push(s);
            let next = (speed + accel * dt).max(0.0);
            pos = pos + dir * ((speed + next) * 0.5 * dt);
            speed = next;
        }
    }
    ScenarioTrackset::from_states(frame_interval_ms, states)
}

/// Two agents on perpendicular straight paths through `crossing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingSpec {
    /// Agent 1 drives along +x, m/s.
    pub speed_a: f64,
    /// Agent 2 drives along +y, m/s.
    pub speed_b: f64,
    /// Seconds between agent 1's and agent 2's reference points passing the
    /// crossing point. Rounded to whole frames; 0 puts both on the crossing
    /// point in the same frame.
    pub offset_s: f64,
    pub crossing: Vec2,
    /// When agent 1 reaches the crossing, seconds after the first frame.
    pub lead_in_s: f64,
    /// Recording continues this long after the later arrival.
    pub tail_s: f64,
    pub frame_interval_ms: i64,
    /// Outline for all agents; `None` makes them point agents.
    pub footprint: Option<Footprint>,
    /// Adds a standing agent 3 next to the approach of agent 1.
    pub bystander: bool,
}

impl Default for CrossingSpec {
    fn default() -> Self {
        CrossingSpec {
            speed_a: 10.0,
            speed_b: 10.0,
            offset_s: 0.0,
            crossing: Vec2::new(0.5, 0.5),
            lead_in_s: 3.0,
            tail_s: 3.0,
            frame_interval_ms: 100,
            footprint: None,
            bystander: false,
        }
    }
}

/// Where the bystander of [`build_crossing_scenario`] stands, relative to
/// the crossing point.
pub const BYSTANDER_OFFSET: Vec2 = Vec2::new(-5.0, -5.0);

pub fn build_crossing_scenario(spec: &CrossingSpec) -> Result<ScenarioTrackset> {
    let pos = |v: f64| v.is_finite() && v > 0.0;
    if !pos(spec.speed_a) || !pos(spec.speed_b) {
        return Err(Error::InvalidSpec("crossing speeds must be positive".into()));
    }
    if !spec.offset_s.is_finite()
        || spec.lead_in_s.is_nan()
        || spec.lead_in_s < 0.0
        || spec.tail_s.is_nan()
        || spec.tail_s < 0.0
        || spec.frame_interval_ms <= 0
    {
        return Err(Error::InvalidSpec("crossing timing must be finite and non-negative".into()));
    }
    let dt = spec.frame_interval_ms;
    let frames_of = |s: f64| libm::round(s * 1000.0 / dt as f64) as i64;
    let arrival_a = frames_of(spec.lead_in_s);
    let arrival_b = arrival_a + frames_of(spec.offset_s);
    let first = arrival_a.min(arrival_b).min(0);
    let last = arrival_a.max(arrival_b) + frames_of(spec.tail_s);

    let place = |id: u64, k: i64, p: Vec2, v: Vec2, heading: f64| {
        let s = AgentState::new(id, (k - first) * dt, p, v, heading);
        match spec.footprint {
            Some(fp) => s.with_footprint(fp.length, fp.width),
            None => s,
        }
    };
    let mut states = Vec::new();
    for k in first..=last {
        // elapsed seconds relative to each arrival, exact zero at the arrival frame
        let ta = ((k - arrival_a) * dt) as f64 / 1000.0;
        let tb = ((k - arrival_b) * dt) as f64 / 1000.0;
        let va = Vec2::new(spec.speed_a, 0.0);
        let vb = Vec2::new(0.0, spec.speed_b);
        states.push(place(1, k, spec.crossing + va * ta, va, 0.0));
        states.push(place(2, k, spec.crossing + vb * tb, vb, FRAC_PI_2));
        if spec.bystander {
            states.push(place(3, k, spec.crossing + BYSTANDER_OFFSET, Vec2::ZERO, 0.0));
        }
    }
    ScenarioTrackset::from_states(dt, states)
}
