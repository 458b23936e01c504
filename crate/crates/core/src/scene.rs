//! Agents, scenes and recordings, plus the geometric and kinematic queries
//! that every metric consumes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Footprint, OrientedRect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AgentType {
    Car,
    TruckBus,
    Other,
}

impl AgentType {
    /// Maps a free-form type label; anything unrecognized becomes `Other`.
    pub fn parse(label: &str) -> AgentType {
        match label.trim().to_ascii_lowercase().as_str() {
            "car" => AgentType::Car,
            "truck" | "bus" | "truck_bus" | "truck/bus" => AgentType::TruckBus,
            _ => AgentType::Other,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AgentType::Car => "car",
            AgentType::TruckBus => "truck_bus",
            AgentType::Other => "other",
        }
    }

    pub fn is_vehicle(&self) -> bool {
        matches!(self, AgentType::Car | AgentType::TruckBus)
    }
}

/// Kinematic state of one agent at one timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub timestamp_ms: i64,
    pub position: Vec2,
    pub velocity: Vec2,
    /// Radians in `[-pi, pi]`.
    pub heading: f64,
    /// `None` when the outline is unknown; gap distances then fall back to
    /// center distances.
    pub footprint: Option<Footprint>,
    pub agent_type: AgentType,
}

impl AgentState {
    pub fn new(id: u64, timestamp_ms: i64, position: Vec2, velocity: Vec2, heading: f64) -> Self {
        AgentState {
            id: AgentId(id),
            timestamp_ms,
            position,
            velocity,
            heading: normalize_angle(heading),
            footprint: None,
            agent_type: AgentType::Car,
        }
    }

    pub fn with_footprint(mut self, length: f64, width: f64) -> Self {
        self.footprint = Footprint::new(length, width);
        self
    }

    pub fn with_type(mut self, agent_type: AgentType) -> Self {
        self.agent_type = agent_type;
        self
    }

    #[inline]
    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }

    pub fn rect(&self) -> Option<OrientedRect> {
        self.footprint.map(|fp| OrientedRect::new(self.position, self.heading, fp))
    }

    pub fn circumradius(&self) -> f64 {
        self.footprint.map_or(0.0, |fp| fp.circumradius())
    }
}

/// Euclidean distance between the two reference points.
pub fn center_distance(a: &AgentState, b: &AgentState) -> f64 {
    (a.position - b.position).norm()
}

/// Distance between the two vehicle bodies; 0 on overlap. Falls back to the
/// center distance when either footprint is unknown.
pub fn gap_distance(a: &AgentState, b: &AgentState) -> f64 {
    match (a.rect(), b.rect()) {
        (Some(ra), Some(rb)) => ra.distance(&rb),
        _ => center_distance(a, b),
    }
}

/// Constant-deceleration stopping distance with an optional reaction delay.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BrakingModel {
    /// m/s², strictly positive.
    pub decel: f64,
    /// Seconds, non-negative.
    pub reaction_time: f64,
}

impl Default for BrakingModel {
    fn default() -> Self {
        BrakingModel { decel: 4.0, reaction_time: 0.0 }
    }
}

impl BrakingModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.decel.is_finite() && self.decel > 0.0) {
            return Err(Error::InvalidConfig("braking deceleration must be positive"));
        }
        if !(self.reaction_time.is_finite() && self.reaction_time >= 0.0) {
            return Err(Error::InvalidConfig("reaction time must be non-negative"));
        }
        Ok(())
    }

    /// `v * t_react + v^2 / (2 a)`.
    pub fn distance_for_speed(&self, speed: f64) -> f64 {
        speed * self.reaction_time + speed * speed / (2.0 * self.decel)
    }

    pub fn braking_distance(&self, agent: &AgentState) -> f64 {
        self.distance_for_speed(agent.speed())
    }
}

/// All agents at one timestamp, sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    timestamp_ms: i64,
    agents: Vec<AgentState>,
}

impl Scene {
    pub fn new(timestamp_ms: i64, mut agents: Vec<AgentState>) -> Result<Self> {
        if let Some(a) = agents.iter().find(|a| a.timestamp_ms != timestamp_ms) {
            return Err(Error::TimestampMismatch { agent: a.id, expected_ms: timestamp_ms, found_ms: a.timestamp_ms });
        }
        agents.sort_by_key(|a| a.id);
        if let Some(w) = agents.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::DuplicateAgent { agent: w[0].id, timestamp_ms });
        }
        Ok(Scene { timestamp_ms, agents })
    }

    pub fn timestamp_ms(&self) -> i64 {
        self.timestamp_ms
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn get(&self, id: AgentId) -> Option<&AgentState> {
        self.agents.binary_search_by_key(&id, |a| a.id).ok().map(|i| &self.agents[i])
    }

    pub fn require(&self, id: AgentId) -> Result<&AgentState> {
        self.get(id).ok_or(Error::MissingAgent { agent: id, timestamp_ms: Some(self.timestamp_ms) })
    }

    /// Every agent except `ego`.
    pub fn others(&self, ego: AgentId) -> impl Iterator<Item = &AgentState> + '_ {
        self.agents.iter().filter(move |a| a.id != ego)
    }

    /// Non-ego agents whose body gap to the ego is within the ego's braking
    /// distance. A standing ego (braking distance 0) reaches nobody.
    pub fn within_braking_distance(&self, ego: AgentId, model: &BrakingModel) -> Result<Vec<AgentId>> {
        let e = self.require(ego)?;
        let reach = model.braking_distance(e);
        if reach <= 0.0 {
            return Ok(Vec::new());
        }
        Ok(self.others(ego).filter(|a| gap_distance(e, a) <= reach).map(|a| a.id).collect())
    }

    /// Smallest body gap to any other agent, unclamped. `None` for a lone ego.
    pub fn nearest_gap(&self, ego: AgentId) -> Result<Option<f64>> {
        let e = self.require(ego)?;
        Ok(self.others(ego).map(|a| gap_distance(e, a)).reduce(f64::min))
    }

    /// `nearest_gap` clamped below at `floor`.
    pub fn min_gap_to_any(&self, ego: AgentId, floor: f64) -> Result<Option<f64>> {
        Ok(self.nearest_gap(ego)?.map(|d| d.max(floor)))
    }
}

/// One speed/acceleration sample of an agent's recent past.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub timestamp_ms: i64,
    pub speed: f64,
    /// Backward difference of speed, m/s²; 0 on the first frame after an
    /// appearance or a gap.
    pub acceleration: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicHistory {
    pub agent: AgentId,
    /// Oldest first; never empty.
    pub samples: Vec<KinematicSample>,
}

impl KinematicHistory {
    pub fn mean_speed(&self) -> f64 {
        self.samples.iter().map(|s| s.speed).sum::<f64>() / self.samples.len() as f64
    }

    pub fn mean_abs_acceleration(&self) -> f64 {
        self.samples.iter().map(|s| s.acceleration.abs()).sum::<f64>() / self.samples.len() as f64
    }
}

/// A recording: scenes on a fixed frame grid plus a per-agent presence index.
///
/// Timestamps are strictly increasing multiples of the frame interval.
/// Frames with no agents may be missing, and agents may leave and re-enter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTrackset {
    frame_interval_ms: i64,
    frames: Vec<Scene>,
    /// Frame indices at which each agent is present, ascending.
    presence: BTreeMap<AgentId, Vec<usize>>,
}

impl ScenarioTrackset {
    pub fn new(frame_interval_ms: i64, frames: Vec<Scene>) -> Result<Self> {
        if frame_interval_ms <= 0 {
            return Err(Error::InvalidFrameInterval(frame_interval_ms));
        }
        for w in frames.windows(2) {
            let (p, n) = (w[0].timestamp_ms, w[1].timestamp_ms);
            if n <= p || (n - p) % frame_interval_ms != 0 {
                return Err(Error::FrameOrder { previous_ms: p, next_ms: n });
            }
        }
        let mut presence: BTreeMap<AgentId, Vec<usize>> = BTreeMap::new();
        for (i, scene) in frames.iter().enumerate() {
            for a in scene.agents() {
                presence.entry(a.id).or_default().push(i);
            }
        }
        Ok(ScenarioTrackset { frame_interval_ms, frames, presence })
    }

    /// Groups loose states into scenes by timestamp.
    pub fn from_states(frame_interval_ms: i64, states: impl IntoIterator<Item = AgentState>) -> Result<Self> {
        let mut by_time: BTreeMap<i64, Vec<AgentState>> = BTreeMap::new();
        for s in states {
            by_time.entry(s.timestamp_ms).or_default().push(s);
        }
        let frames = by_time.into_iter().map(|(t, agents)| Scene::new(t, agents)).collect::<Result<Vec<_>>>()?;
        Self::new(frame_interval_ms, frames)
    }

    pub fn frame_interval_ms(&self) -> i64 {
        self.frame_interval_ms
    }

    pub fn frames(&self) -> &[Scene] {
        &self.frames
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_index(&self, timestamp_ms: i64) -> Option<usize> {
        self.frames.binary_search_by_key(&timestamp_ms, |s| s.timestamp_ms).ok()
    }

    pub fn scene_at(&self, timestamp_ms: i64) -> Option<&Scene> {
        self.frame_index(timestamp_ms).map(|i| &self.frames[i])
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.presence.keys().copied()
    }

    pub fn agent_count(&self) -> usize {
        self.presence.len()
    }

    /// Frame indices at which `agent` is present.
    pub fn presence(&self, agent: AgentId) -> Option<&[usize]> {
        self.presence.get(&agent).map(Vec::as_slice)
    }

    /// States of `agent` in time order.
    pub fn track(&self, agent: AgentId) -> impl Iterator<Item = &AgentState> + '_ {
        self.presence(agent).unwrap_or(&[]).iter().filter_map(move |&i| self.frames[i].get(agent))
    }

    pub fn duration_ms(&self) -> i64 {
        match (self.frames.first(), self.frames.last()) {
            (Some(a), Some(b)) => b.timestamp_ms - a.timestamp_ms,
            _ => 0,
        }
    }

    /// Position within the agent's presence list of the frame at `timestamp_ms`.
    fn presence_slot(&self, agent: AgentId, timestamp_ms: i64) -> Result<(&[usize], usize)> {
        let missing = Error::MissingAgent { agent, timestamp_ms: Some(timestamp_ms) };
        let list = self.presence(agent).ok_or(missing.clone())?;
        let frame = self.frame_index(timestamp_ms).ok_or(missing.clone())?;
        let slot = list.binary_search(&frame).map_err(|_| missing)?;
        Ok((list, slot))
    }

    fn sample(&self, agent: AgentId, list: &[usize], slot: usize) -> KinematicSample {
        let scene = &self.frames[list[slot]];
        let speed = scene.get(agent).map_or(0.0, AgentState::speed);
        let acceleration = match slot.checked_sub(1).map(|p| &self.frames[list[p]]) {
            Some(prev) if scene.timestamp_ms - prev.timestamp_ms == self.frame_interval_ms => {
                let prev_speed = prev.get(agent).map_or(0.0, AgentState::speed);
                (speed - prev_speed) / (self.frame_interval_ms as f64 / 1000.0)
            }
            _ => 0.0,
        };
        KinematicSample { timestamp_ms: scene.timestamp_ms, speed, acceleration }
    }

    /// Backward-difference acceleration of `agent` at `timestamp_ms`.
    pub fn acceleration_at(&self, agent: AgentId, timestamp_ms: i64) -> Result<f64> {
        let (list, slot) = self.presence_slot(agent, timestamp_ms)?;
        Ok(self.sample(agent, list, slot).acceleration)
    }

    /// Samples covering `[t - window, t]`, stopping at the agent's first
    /// appearance or at the most recent gap in its presence.
    pub fn history(&self, agent: AgentId, timestamp_ms: i64, window_s: f64) -> Result<KinematicHistory> {
        let (list, slot) = self.presence_slot(agent, timestamp_ms)?;
        let window_ms = libm::round(window_s.max(0.0) * 1000.0) as i64;
        let earliest = timestamp_ms - window_ms;
        let mut first = slot;
        while first > 0 {
            let prev_t = self.frames[list[first - 1]].timestamp_ms;
            let cur_t = self.frames[list[first]].timestamp_ms;
            if prev_t < earliest || cur_t - prev_t != self.frame_interval_ms {
                break;
            }
            first -= 1;
        }
        let samples = (first..=slot).map(|k| self.sample(agent, list, k)).collect();
        Ok(KinematicHistory { agent, samples })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn at(id: u64, t: i64, x: f64, y: f64, vx: f64) -> AgentState {
        AgentState::new(id, t, Vec2::new(x, y), Vec2::new(vx, 0.0), 0.0)
    }

    #[test]
    fn center_distance_examples() {
        assert_eq!(center_distance(&at(1, 0, 0.0, 0.0, 0.0), &at(2, 0, 3.0, 4.0, 0.0)), 5.0);
        assert_eq!(center_distance(&at(1, 0, 2.0, 2.0, 0.0), &at(2, 0, 2.0, 2.0, 0.0)), 0.0);
        let d = center_distance(&at(1, 0, 1.0, 1.0, 0.0), &at(2, 0, 2.0, 2.0, 0.0));
        assert!((d - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn gap_distance_examples() {
        let a = at(1, 0, 0.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        let b = at(2, 0, 10.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        assert_eq!(gap_distance(&a, &b), 6.0);
        let c = at(3, 0, 1.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        assert_eq!(gap_distance(&a, &c), 0.0);
        assert_eq!(gap_distance(&at(1, 0, 0.0, 0.0, 0.0), &at(2, 0, 3.0, 4.0, 0.0)), 5.0);
        // one footprint missing falls back to centers
        assert_eq!(gap_distance(&a, &at(2, 0, 3.0, 4.0, 0.0)), 5.0);
    }

    #[test]
    fn braking_distance_examples() {
        let m = BrakingModel { decel: 4.0, reaction_time: 0.0 };
        assert_eq!(m.braking_distance(&at(1, 0, 0.0, 0.0, 10.0)), 12.5);
        assert_eq!(m.braking_distance(&at(1, 0, 0.0, 0.0, 0.0)), 0.0);
        let m = BrakingModel { decel: 4.0, reaction_time: 0.5 };
        assert_eq!(m.braking_distance(&at(1, 0, 0.0, 0.0, 10.0)), 17.5);
    }

    #[test]
    fn braking_set() {
        let m = BrakingModel::default();
        let scene =
            Scene::new(0, vec![at(1, 0, 0.0, 0.0, 10.0), at(2, 0, 10.0, 0.0, 0.0), at(3, 0, -20.0, 0.0, 0.0)]).unwrap();
        assert_eq!(scene.within_braking_distance(AgentId(1), &m).unwrap(), vec![AgentId(2)]);
        // standing agents reach nobody, even at contact
        let stand = Scene::new(0, vec![at(1, 0, 0.0, 0.0, 0.0), at(2, 0, 0.0, 0.0, 0.0)]).unwrap();
        assert!(stand.within_braking_distance(AgentId(1), &m).unwrap().is_empty());
        let alone = Scene::new(0, vec![at(1, 0, 0.0, 0.0, 10.0)]).unwrap();
        assert!(alone.within_braking_distance(AgentId(1), &m).unwrap().is_empty());
        assert!(matches!(alone.within_braking_distance(AgentId(9), &m), Err(Error::MissingAgent { .. })));
    }

    #[test]
    fn min_gap_examples() {
        let scene =
            Scene::new(0, vec![at(1, 0, 0.0, 0.0, 0.0), at(2, 0, 3.0, 0.0, 0.0), at(3, 0, 0.0, -7.5, 0.0)]).unwrap();
        assert_eq!(scene.min_gap_to_any(AgentId(1), 0.1).unwrap(), Some(3.0));
        let contact = Scene::new(0, vec![at(1, 0, 0.0, 0.0, 0.0), at(2, 0, 0.0, 0.0, 0.0)]).unwrap();
        assert_eq!(contact.min_gap_to_any(AgentId(1), 0.1).unwrap(), Some(0.1));
        let alone = Scene::new(0, vec![at(1, 0, 0.0, 0.0, 0.0)]).unwrap();
        assert_eq!(alone.min_gap_to_any(AgentId(1), 0.1).unwrap(), None);
    }

    #[test]
    fn scene_validation() {
        assert!(matches!(
            Scene::new(0, vec![at(1, 0, 0.0, 0.0, 0.0), at(1, 0, 1.0, 0.0, 0.0)]),
            Err(Error::DuplicateAgent { .. })
        ));
        assert!(matches!(Scene::new(0, vec![at(1, 100, 0.0, 0.0, 0.0)]), Err(Error::TimestampMismatch { .. })));
        let s = Scene::new(0, vec![at(5, 0, 0.0, 0.0, 0.0), at(2, 0, 0.0, 0.0, 0.0)]).unwrap();
        assert_eq!(s.agents()[0].id, AgentId(2));
    }

    #[test]
    fn trackset_frame_grid() {
        let s0 = Scene::new(0, vec![]).unwrap();
        let s1 = Scene::new(150, vec![]).unwrap();
        assert!(matches!(ScenarioTrackset::new(100, vec![s0.clone(), s1]), Err(Error::FrameOrder { .. })));
        assert!(matches!(ScenarioTrackset::new(0, vec![s0]), Err(Error::InvalidFrameInterval(0))));
    }

    fn ramp_track(frames: impl IntoIterator<Item = i64>) -> ScenarioTrackset {
        // speed equals the frame index, so acceleration is 10 m/s² at 100 ms
        let states = frames.into_iter().map(|k| at(1, k * 100, 0.0, 0.0, k as f64));
        ScenarioTrackset::from_states(100, states).unwrap()
    }

    #[test]
    fn history_window_length() {
        let ts = ramp_track(0..100);
        let h = ts.history(AgentId(1), 5000, 2.0).unwrap();
        assert_eq!(h.samples.len(), 21);
        assert_eq!(h.samples[0].timestamp_ms, 3000);
        // sample before the window still feeds the first acceleration
        assert!(h.samples.iter().all(|s| (s.acceleration - 10.0).abs() < 1e-9));
    }

    #[test]
    fn history_first_frame() {
        let ts = ramp_track(0..100);
        let h = ts.history(AgentId(1), 0, 2.0).unwrap();
        assert_eq!(h.samples.len(), 1);
        assert_eq!(h.samples[0].acceleration, 0.0);
    }

    #[test]
    fn history_stops_at_gap() {
        let ts = ramp_track((0..30).chain(35..60));
        let h = ts.history(AgentId(1), 3800, 2.0).unwrap();
        assert_eq!(h.samples.first().unwrap().timestamp_ms, 3500);
        assert_eq!(h.samples.len(), 4);
        assert_eq!(h.samples[0].acceleration, 0.0);
        assert!(matches!(ts.history(AgentId(1), 3200, 2.0), Err(Error::MissingAgent { .. })));
        assert!(matches!(ts.history(AgentId(7), 3800, 2.0), Err(Error::MissingAgent { .. })));
    }
}
