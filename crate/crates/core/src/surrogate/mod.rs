//! Baseline surrogate safety measures.
//!
//! All seven are pairwise. A scene-level value for an ego is the minimum
//! over its adversaries of the defined pair values, and it is critical when
//! defined and strictly below the metric's threshold. Undefined values are
//! never critical.

pub mod conflict;
pub mod kinematic;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scene::{gap_distance, AgentId, ScenarioTrackset, Scene};
use conflict::{Grid, OccupancyIndex, ProjectedPath};

pub use conflict::{conflict_regions, ConflictRegion};
pub use kinematic::{pttc, ttc, wttc};

/// The baselines, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SurrogateMetric {
    Dist,
    Et,
    Gt,
    Pet,
    Pttc,
    Ttc,
    Wttc,
}

impl SurrogateMetric {
    pub const ALL: [SurrogateMetric; 7] = [
        SurrogateMetric::Dist,
        SurrogateMetric::Et,
        SurrogateMetric::Gt,
        SurrogateMetric::Pet,
        SurrogateMetric::Pttc,
        SurrogateMetric::Ttc,
        SurrogateMetric::Wttc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SurrogateMetric::Dist => "dist",
            SurrogateMetric::Et => "et",
            SurrogateMetric::Gt => "gt",
            SurrogateMetric::Pet => "pet",
            SurrogateMetric::Pttc => "pttc",
            SurrogateMetric::Ttc => "ttc",
            SurrogateMetric::Wttc => "wttc",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SurrogateConfig {
    pub ttc_threshold: f64,
    pub pttc_threshold: f64,
    pub pet_threshold: f64,
    pub et_threshold: f64,
    pub gt_threshold: f64,
    pub wttc_threshold: f64,
    /// Meters.
    pub dist_threshold: f64,
    /// Maximum acceleration for the worst-case reachable disks, m/s².
    pub a_max_wttc: f64,
    /// Fixed adversary deceleration for PTTC; `None` uses the adversary's
    /// observed braking at that frame.
    pub pttc_decel: Option<f64>,
    /// Conflict grid cell size, meters.
    pub conflict_cell: f64,
    /// How far ahead gap time extrapolates, seconds.
    pub gt_horizon_s: f64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            ttc_threshold: 1.5,
            pttc_threshold: 1.5,
            pet_threshold: 1.5,
            et_threshold: 1.5,
            gt_threshold: 1.5,
            wttc_threshold: 0.47,
            dist_threshold: 1.0,
            a_max_wttc: 7.0,
            pttc_decel: None,
            conflict_cell: 1.0,
            gt_horizon_s: 10.0,
        }
    }
}

impl SurrogateConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        let thresholds = [
            self.ttc_threshold,
            self.pttc_threshold,
            self.pet_threshold,
            self.et_threshold,
            self.gt_threshold,
            self.wttc_threshold,
            self.dist_threshold,
        ];
        if !thresholds.into_iter().all(pos) {
            return Err(Error::InvalidConfig("surrogate thresholds must be positive"));
        }
        if !pos(self.a_max_wttc) {
            return Err(Error::InvalidConfig("worst-case acceleration must be positive"));
        }
        if let Some(d) = self.pttc_decel {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidConfig("PTTC deceleration must be non-negative"));
            }
        }
        if !pos(self.gt_horizon_s) {
            return Err(Error::InvalidConfig("gap time horizon must be positive"));
        }
        Grid::new(self.conflict_cell).map(|_| ())
    }

    pub fn threshold(&self, metric: SurrogateMetric) -> f64 {
        match metric {
            SurrogateMetric::Dist => self.dist_threshold,
            SurrogateMetric::Et => self.et_threshold,
            SurrogateMetric::Gt => self.gt_threshold,
            SurrogateMetric::Pet => self.pet_threshold,
            SurrogateMetric::Pttc => self.pttc_threshold,
            SurrogateMetric::Ttc => self.ttc_threshold,
            SurrogateMetric::Wttc => self.wttc_threshold,
        }
    }

    pub fn is_critical(&self, metric: SurrogateMetric, value: Option<f64>) -> bool {
        value.is_some_and(|v| v < self.threshold(metric))
    }
}

/// One metric on one (ego, adversary) pair at one timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetricValue {
    pub ego: AgentId,
    pub adversary: AgentId,
    pub timestamp_ms: i64,
    pub metric: SurrogateMetric,
    /// Seconds, or meters for `Dist`.
    pub value: Option<f64>,
}

impl PairMetricValue {
    pub fn defined(&self) -> bool {
        self.value.is_some()
    }
}

/// Scene-level value of one metric for one ego.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneMetricValue {
    pub timestamp_ms: i64,
    pub ego: AgentId,
    pub metric: SurrogateMetric,
    pub value: Option<f64>,
    pub critical: bool,
}

/// Minimum body gap to any other agent; `None` for a lone ego.
pub fn dist_metric(scene: &Scene, ego: AgentId) -> Result<Option<f64>> {
    scene.nearest_gap(ego)
}

/// Trajectory-level quantities of one pair, computed once per recording.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairConflict {
    pet: Option<f64>,
    et: Option<f64>,
    /// Frames inside `[entry, exit)` carry the pair's PET and ET.
    episode: Option<(i64, i64)>,
}

fn ordered(a: AgentId, b: AgentId) -> (AgentId, AgentId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Scores the surrogate measures over one recording.
///
/// Construction rasterizes every agent once and caches the conflict summary
/// of every pair that shares a frame; afterwards all queries are reads, so
/// frames can be scored from several threads.
#[derive(Debug)]
pub struct SurrogateScorer<'a> {
    ts: &'a ScenarioTrackset,
    config: SurrogateConfig,
    grid: Grid,
    pairs: BTreeMap<(AgentId, AgentId), PairConflict>,
}

impl<'a> SurrogateScorer<'a> {
    pub fn new(ts: &'a ScenarioTrackset, config: SurrogateConfig) -> Result<Self> {
        config.validate()?;
        let grid = Grid::new(config.conflict_cell)?;
        let index = OccupancyIndex::build(ts, grid);
        let mut keys = BTreeSet::new();
        for scene in ts.frames() {
            let ids: Vec<AgentId> = scene.agents().iter().map(|a| a.id).collect();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    keys.insert((a, b));
                }
            }
        }
        let mut pairs = BTreeMap::new();
        for (a, b) in keys {
            let region = index.region(a, b)?;
            let summary = PairConflict {
                pet: region.pet(),
                et: region.encroachment_time(),
                episode: region.episode().map(|o| (o.entry_ms, o.exit_ms)),
            };
            pairs.insert((a, b), summary);
        }
        Ok(SurrogateScorer { ts, config, grid, pairs })
    }

    pub fn config(&self) -> &SurrogateConfig {
        &self.config
    }

    pub fn trackset(&self) -> &ScenarioTrackset {
        self.ts
    }

    fn pair_conflict(&self, a: AgentId, b: AgentId, timestamp_ms: i64) -> (Option<f64>, Option<f64>) {
        match self.pairs.get(&ordered(a, b)) {
            Some(p) if p.episode.is_some_and(|(s, e)| s <= timestamp_ms && timestamp_ms < e) => (p.pet, p.et),
            _ => (None, None),
        }
    }

    /// PET of the pair over the whole recording, ignoring the episode window.
    pub fn pair_pet(&self, a: AgentId, b: AgentId) -> Option<f64> {
        self.pairs.get(&ordered(a, b)).and_then(|p| p.pet)
    }

    pub fn pair_et(&self, a: AgentId, b: AgentId) -> Option<f64> {
        self.pairs.get(&ordered(a, b)).and_then(|p| p.et)
    }

    fn adversary_decel(&self, adversary: AgentId, timestamp_ms: i64) -> f64 {
        match self.config.pttc_decel {
            Some(d) => d,
            None => self.ts.acceleration_at(adversary, timestamp_ms).map_or(0.0, |a| (-a).max(0.0)),
        }
    }

    /// All seven values of every (ego, adversary) pair present in the frame,
    /// ego then adversary ascending, metrics in [`SurrogateMetric::ALL`] order.
    pub fn pair_values(&self, frame_index: usize) -> Vec<PairMetricValue> {
        let scene = &self.ts.frames()[frame_index];
        let paths = self.paths(scene);
        let mut out = Vec::with_capacity(scene.len() * scene.len().saturating_sub(1) * 7);
        for (ei, ego) in scene.agents().iter().enumerate() {
            for (ai, adv) in scene.agents().iter().enumerate() {
                if ei == ai {
                    continue;
                }
                let values = self.pair_array(scene, ei, ai, &paths);
                for m in SurrogateMetric::ALL {
                    out.push(PairMetricValue {
                        ego: ego.id,
                        adversary: adv.id,
                        timestamp_ms: scene.timestamp_ms(),
                        metric: m,
                        value: values[m.index()],
                    });
                }
            }
        }
        out
    }

    /// Single metric on a single pair at one timestamp.
    pub fn pair_value(
        &self,
        metric: SurrogateMetric,
        ego: AgentId,
        adversary: AgentId,
        timestamp_ms: i64,
    ) -> Result<Option<f64>> {
        let frame = self
            .ts
            .frame_index(timestamp_ms)
            .ok_or(Error::MissingAgent { agent: ego, timestamp_ms: Some(timestamp_ms) })?;
        let scene = &self.ts.frames()[frame];
        let ei = scene.agents().iter().position(|a| a.id == ego);
        let ai = scene.agents().iter().position(|a| a.id == adversary);
        let (ei, ai) = match (ei, ai) {
            (Some(e), Some(a)) => (e, a),
            (None, _) => return Err(Error::MissingAgent { agent: ego, timestamp_ms: Some(timestamp_ms) }),
            (_, None) => return Err(Error::MissingAgent { agent: adversary, timestamp_ms: Some(timestamp_ms) }),
        };
        let paths = self.paths(scene);
        Ok(self.pair_array(scene, ei, ai, &paths)[metric.index()])
    }

    fn paths(&self, scene: &Scene) -> Vec<Option<ProjectedPath>> {
        scene.agents().iter().map(|a| ProjectedPath::new(&self.grid, a, self.config.gt_horizon_s)).collect()
    }

    fn pair_array(&self, scene: &Scene, ei: usize, ai: usize, paths: &[Option<ProjectedPath>]) -> [Option<f64>; 7] {
        let ego = &scene.agents()[ei];
        let adv = &scene.agents()[ai];
        let t = scene.timestamp_ms();
        let (pet, et) = self.pair_conflict(ego.id, adv.id, t);
        let gt = match (&paths[ei], &paths[ai]) {
            (Some(a), Some(b)) => a.gap_time(b),
            _ => None,
        };
        [
            Some(gap_distance(ego, adv)),
            et,
            gt,
            pet,
            kinematic::pttc(ego, adv, self.adversary_decel(adv.id, t)),
            kinematic::ttc(ego, adv),
            kinematic::wttc(ego, adv, self.config.a_max_wttc),
        ]
    }

    /// Scene-level minima for every ego of the frame, ego ascending, metrics
    /// in [`SurrogateMetric::ALL`] order.
    pub fn score_frame(&self, frame_index: usize) -> Vec<SceneMetricValue> {
        let scene = &self.ts.frames()[frame_index];
        let paths = self.paths(scene);
        let mut out = Vec::with_capacity(scene.len() * 7);
        for ei in 0..scene.len() {
            let mut best: [Option<f64>; 7] = [None; 7];
            for ai in 0..scene.len() {
                if ai == ei {
                    continue;
                }
                let values = self.pair_array(scene, ei, ai, &paths);
                for (slot, v) in best.iter_mut().zip(values) {
                    if let Some(v) = v {
                        *slot = Some(slot.map_or(v, |b: f64| b.min(v)));
                    }
                }
            }
            for m in SurrogateMetric::ALL {
                let value = best[m.index()];
                out.push(SceneMetricValue {
                    timestamp_ms: scene.timestamp_ms(),
                    ego: scene.agents()[ei].id,
                    metric: m,
                    value,
                    critical: self.config.is_critical(m, value),
                });
            }
        }
        out
    }
}

/// Every scene-level value of a recording and, when asked, every pair value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurrogateScores {
    pub scene: Vec<SceneMetricValue>,
    pub pairs: Vec<PairMetricValue>,
}

/// Sequential convenience over [`SurrogateScorer`], ordered by timestamp,
/// then ego, then metric.
pub fn score_all_surrogates(
    ts: &ScenarioTrackset,
    config: SurrogateConfig,
    with_pairs: bool,
) -> Result<SurrogateScores> {
    let scorer = SurrogateScorer::new(ts, config)?;
    let mut scores = SurrogateScores::default();
    for i in 0..ts.frames().len() {
        scores.scene.extend(scorer.score_frame(i));
        if with_pairs {
            scores.pairs.extend(scorer.pair_values(i));
        }
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scene::AgentState;
    use alloc::vec;

    fn point(id: u64, t: i64, x: f64, y: f64, vx: f64, vy: f64) -> AgentState {
        AgentState::new(id, t, Vec2::new(x, y), Vec2::new(vx, vy), 0.0)
    }

    fn single_frame(agents: Vec<AgentState>) -> ScenarioTrackset {
        ScenarioTrackset::new(100, vec![Scene::new(0, agents).unwrap()]).unwrap()
    }

    fn scene_value(scores: &SurrogateScores, ego: u64, m: SurrogateMetric) -> SceneMetricValue {
        *scores.scene.iter().find(|v| v.ego == AgentId(ego) && v.metric == m).unwrap()
    }

    #[test]
    fn dist_examples() {
        let ts = single_frame(vec![
            point(1, 0, 0.0, 0.0, 0.0, 0.0),
            point(2, 0, 2.75, 0.0, 0.0, 0.0),
            point(3, 0, 0.0, 9.0, 0.0, 0.0),
        ]);
        let s = score_all_surrogates(&ts, SurrogateConfig::default(), false).unwrap();
        let v = scene_value(&s, 1, SurrogateMetric::Dist);
        assert_eq!(v.value, Some(2.75));
        assert!(!v.critical);
        let ts = single_frame(vec![point(1, 0, 0.0, 0.0, 0.0, 0.0), point(2, 0, 0.5, 0.0, 0.0, 0.0)]);
        let s = score_all_surrogates(&ts, SurrogateConfig::default(), false).unwrap();
        assert!(scene_value(&s, 1, SurrogateMetric::Dist).critical);
        let ts = single_frame(vec![point(1, 0, 0.0, 0.0, 5.0, 0.0)]);
        let s = score_all_surrogates(&ts, SurrogateConfig::default(), false).unwrap();
        for m in SurrogateMetric::ALL {
            let v = scene_value(&s, 1, m);
            assert_eq!(v.value, None);
            assert!(!v.critical);
        }
    }

    #[test]
    fn min_over_adversaries() {
        let ts = single_frame(vec![
            point(1, 0, 0.0, 0.0, 10.0, 0.0),
            point(2, 0, 12.0, 0.0, 0.0, 0.0),
            point(3, 0, -30.0, 0.0, 0.0, 0.0),
        ]);
        let s = score_all_surrogates(&ts, SurrogateConfig::default(), true).unwrap();
        let ttc = scene_value(&s, 1, SurrogateMetric::Ttc);
        assert_eq!(ttc.value, Some(1.2));
        assert!(ttc.critical);
        // 3 egos x 2 adversaries x 7 metrics
        assert_eq!(s.pairs.len(), 42);
        assert!(s.pairs.iter().any(|p| p.adversary == AgentId(3) && p.metric == SurrogateMetric::Ttc && !p.defined()));
    }

    #[test]
    fn observed_braking_feeds_pttc() {
        // adversary ahead slows from 6 to 5 m/s: 10 m/s² of braking
        let states = [
            point(1, 0, 0.0, 0.0, 5.0, 0.0),
            point(2, 0, 20.0, 0.0, 6.0, 0.0),
            point(1, 100, 0.5, 0.0, 5.0, 0.0),
            point(2, 100, 20.5, 0.0, 5.0, 0.0),
        ];
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let scorer = SurrogateScorer::new(&ts, SurrogateConfig::default()).unwrap();
        let v = scorer.pair_value(SurrogateMetric::Pttc, AgentId(1), AgentId(2), 100).unwrap().unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        assert_eq!(scorer.pair_value(SurrogateMetric::Ttc, AgentId(1), AgentId(2), 100).unwrap(), None);
        let fixed = SurrogateConfig { pttc_decel: Some(0.0), ..Default::default() };
        let scorer = SurrogateScorer::new(&ts, fixed).unwrap();
        assert_eq!(scorer.pair_value(SurrogateMetric::Pttc, AgentId(1), AgentId(2), 100).unwrap(), None);
        assert!(matches!(
            scorer.pair_value(SurrogateMetric::Pttc, AgentId(1), AgentId(5), 100),
            Err(Error::MissingAgent { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(SurrogateConfig::default().validate().is_ok());
        assert!(SurrogateConfig { wttc_threshold: 0.0, ..Default::default() }.validate().is_err());
        assert!(SurrogateConfig { conflict_cell: -1.0, ..Default::default() }.validate().is_err());
        let c = SurrogateConfig::default();
        assert!(c.is_critical(SurrogateMetric::Wttc, Some(0.46)));
        assert!(!c.is_critical(SurrogateMetric::Wttc, Some(0.47)));
        assert!(!c.is_critical(SurrogateMetric::Ttc, None));
    }
}
