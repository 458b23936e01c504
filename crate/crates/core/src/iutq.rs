//! Inverse universal traffic quality.
//!
//! Four sub-metrics look at a scene from different distances around an ego
//! vehicle:
//!
//! * macroscopic: coefficient of variation of all speeds in the scene,
//! * metascopic: share of the other vehicles inside the ego's braking distance,
//! * mesoscopic: coefficient of variation of the speeds inside that distance
//!   (ego included),
//! * microscopic: the ego's recent mean |acceleration| and mean speed relative
//!   to urban reference values.
//!
//! Their l2 norm is the combined score. A distance-based penalty factor scales
//! it down when nobody is close to the ego.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::scene::{AgentId, AgentState, BrakingModel, ScenarioTrackset, Scene};

/// Distance-based factor applied to the combined score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Penalty {
    None,
    /// `1.5 / d_min`
    Rho1,
    /// `exp(-d_min / 5)`
    #[default]
    Rho2,
    /// `exp(-(d_min - 1) / 10)`
    Rho3,
}

impl Penalty {
    pub const ALL: [Penalty; 4] = [Penalty::None, Penalty::Rho1, Penalty::Rho2, Penalty::Rho3];

    pub fn as_str(&self) -> &'static str {
        match self {
            Penalty::None => "none",
            Penalty::Rho1 => "rho1",
            Penalty::Rho2 => "rho2",
            Penalty::Rho3 => "rho3",
        }
    }

    pub fn parse(s: &str) -> Option<Penalty> {
        Penalty::ALL.into_iter().find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
    }

    /// Evaluates the factor at `d_min`. With nobody else in the scene
    /// (`None`) every distance penalty is 0; `Penalty::None` is always 1.
    pub fn factor(&self, d_min: Option<f64>) -> f64 {
        let Some(d) = d_min else {
            return if *self == Penalty::None { 1.0 } else { 0.0 };
        };
        match self {
            Penalty::None => 1.0,
            Penalty::Rho1 => 1.5 / d,
            Penalty::Rho2 => math::exp(-d / 5.0),
            Penalty::Rho3 => math::exp(-(d - 1.0) / 10.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IutqConfig {
    /// Reference speed, m/s.
    pub v_ref: f64,
    /// Reference acceleration, m/s².
    pub a_ref: f64,
    /// Length of the microscopic history, seconds.
    pub window_s: f64,
    pub braking: BrakingModel,
    /// Floor on mean speeds in coefficients of variation, m/s.
    pub epsilon_speed: f64,
    /// Floor on `d_min`, meters.
    pub epsilon_distance: f64,
    pub penalty: Penalty,
    pub threshold_combined: f64,
    pub threshold_penalized: f64,
}

impl Default for IutqConfig {
    fn default() -> Self {
        IutqConfig {
            v_ref: 50.0 / 3.6,
            a_ref: 1.5,
            window_s: 2.0,
            braking: BrakingModel::default(),
            epsilon_speed: 0.1,
            epsilon_distance: 0.1,
            penalty: Penalty::Rho2,
            threshold_combined: 1.5,
            threshold_penalized: 1.0,
        }
    }
}

impl IutqConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.v_ref) || !pos(self.a_ref) {
            return Err(Error::InvalidConfig("reference speed and acceleration must be positive"));
        }
        if !(self.window_s.is_finite() && self.window_s >= 0.0) {
            return Err(Error::InvalidConfig("history window must be non-negative"));
        }
        if !pos(self.epsilon_speed) || !pos(self.epsilon_distance) {
            return Err(Error::InvalidConfig("speed and distance floors must be positive"));
        }
        if !pos(self.threshold_combined) || !pos(self.threshold_penalized) {
            return Err(Error::InvalidConfig("thresholds must be positive"));
        }
        self.braking.validate()
    }

    /// Threshold that applies to scores computed with `penalty`.
    pub fn threshold_for(&self, penalty: Penalty) -> f64 {
        match penalty {
            Penalty::None => self.threshold_combined,
            _ => self.threshold_penalized,
        }
    }
}

/// All intermediate values of one (scene, ego) score.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IutqBreakdown {
    pub tq_macro: f64,
    pub tq_meta: f64,
    pub tq_meso: f64,
    pub tq_micro: f64,
    pub tq_combined: f64,
    pub penalty: Penalty,
    pub penalty_factor: f64,
    pub tq_final: f64,
    pub critical: bool,
    /// Clamped body gap to the nearest other vehicle; `None` for a lone ego.
    pub d_min: Option<f64>,
}

impl IutqBreakdown {
    /// Final score under another penalty, reusing the sub-metrics.
    pub fn final_with(&self, penalty: Penalty) -> f64 {
        penalty.factor(self.d_min) * self.tq_combined
    }

    pub fn critical_with(&self, penalty: Penalty, config: &IutqConfig) -> bool {
        self.final_with(penalty) >= config.threshold_for(penalty)
    }
}

fn coefficient_of_variation(speeds: &mut [f64], floor: f64) -> f64 {
    let (mean, std) = math::mean_and_std(speeds);
    std / mean.max(floor)
}

/// Coefficient of variation of all speeds in the scene; the same for every
/// ego.
pub fn tq_macroscopic(scene: &Scene, config: &IutqConfig) -> Result<f64> {
    if scene.is_empty() {
        return Err(Error::EmptyScene { timestamp_ms: scene.timestamp_ms() });
    }
    let mut speeds: Vec<f64> = scene.agents().iter().map(AgentState::speed).collect();
    Ok(coefficient_of_variation(&mut speeds, config.epsilon_speed))
}

fn metascopic_ratio(scene: &Scene, reached: usize) -> f64 {
    let others = scene.len().saturating_sub(1);
    if others == 0 {
        0.0
    } else {
        reached as f64 / others as f64
    }
}

/// Fraction of the other vehicles that lie within the ego's braking distance.
pub fn tq_metascopic(scene: &Scene, ego: AgentId, config: &IutqConfig) -> Result<f64> {
    let reached = scene.within_braking_distance(ego, &config.braking)?;
    Ok(metascopic_ratio(scene, reached.len()))
}

fn mesoscopic_value(scene: &Scene, ego: &AgentState, reached: &[AgentId], config: &IutqConfig) -> f64 {
    if reached.is_empty() {
        return 0.0;
    }
    let mut speeds: Vec<f64> = core::iter::once(ego.speed())
        .chain(reached.iter().filter_map(|id| scene.get(*id)).map(AgentState::speed))
        .collect();
    coefficient_of_variation(&mut speeds, config.epsilon_speed)
}

/// Coefficient of variation of speeds over the ego and everyone inside its
/// braking distance.
pub fn tq_mesoscopic(scene: &Scene, ego: AgentId, config: &IutqConfig) -> Result<f64> {
    let e = scene.require(ego)?;
    let reached = scene.within_braking_distance(ego, &config.braking)?;
    Ok(mesoscopic_value(scene, e, &reached, config))
}

/// Mean |acceleration| over `a_ref` and mean speed over `v_ref`, averaged,
/// both taken over the ego's recent history.
pub fn tq_microscopic(ts: &ScenarioTrackset, ego: AgentId, timestamp_ms: i64, config: &IutqConfig) -> Result<f64> {
    let h = ts.history(ego, timestamp_ms, config.window_s)?;
    Ok((h.mean_abs_acceleration() / config.a_ref + h.mean_speed() / config.v_ref) / 2.0)
}

/// l2 norm of the four sub-metrics.
pub fn tq_combined(sub: [f64; 4]) -> f64 {
    math::sqrt(sub.iter().map(|v| v * v).sum())
}

/// Full breakdown for one ego in one scene of `ts`.
pub fn score_scene(ts: &ScenarioTrackset, scene: &Scene, ego: AgentId, config: &IutqConfig) -> Result<IutqBreakdown> {
    let e = scene.require(ego)?;
    let tq_macro = tq_macroscopic(scene, config)?;
    let reached = scene.within_braking_distance(ego, &config.braking)?;
    let tq_meta = metascopic_ratio(scene, reached.len());
    let tq_meso = mesoscopic_value(scene, e, &reached, config);
    let tq_micro = tq_microscopic(ts, ego, scene.timestamp_ms(), config)?;
    let tq_combined = tq_combined([tq_macro, tq_meta, tq_meso, tq_micro]);
    let d_min = scene.min_gap_to_any(ego, config.epsilon_distance)?;
    let penalty_factor = config.penalty.factor(d_min);
    let tq_final = penalty_factor * tq_combined;
    Ok(IutqBreakdown {
        tq_macro,
        tq_meta,
        tq_meso,
        tq_micro,
        tq_combined,
        penalty: config.penalty,
        penalty_factor,
        tq_final,
        critical: tq_final >= config.threshold_for(config.penalty),
        d_min,
    })
}

/// Breakdowns for every agent of the frame at `frame_index`, ego ids ascending.
pub fn score_frame(
    ts: &ScenarioTrackset,
    frame_index: usize,
    config: &IutqConfig,
) -> Result<Vec<(AgentId, IutqBreakdown)>> {
    let scene = &ts.frames()[frame_index];
    scene.agents().iter().map(|a| score_scene(ts, scene, a.id, config).map(|b| (a.id, b))).collect()
}

/// One breakdown per agent per scene, ordered by timestamp then ego id.
pub fn score_all(ts: &ScenarioTrackset, config: &IutqConfig) -> Result<Vec<(i64, AgentId, IutqBreakdown)>> {
    let mut out = Vec::new();
    for (i, scene) in ts.frames().iter().enumerate() {
        for (id, b) in score_frame(ts, i, config)? {
            out.push((scene.timestamp_ms(), id, b));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use alloc::vec;

    fn agent(id: u64, x: f64, y: f64, speed: f64) -> AgentState {
        AgentState::new(id, 0, Vec2::new(x, y), Vec2::new(speed, 0.0), 0.0)
    }

    fn scene(agents: Vec<AgentState>) -> Scene {
        Scene::new(0, agents).unwrap()
    }

    fn cfg() -> IutqConfig {
        IutqConfig::default()
    }

    #[test]
    fn macroscopic_examples() {
        let s = scene(vec![agent(1, 0.0, 0.0, 7.0), agent(2, 50.0, 0.0, 7.0), agent(3, 90.0, 0.0, 7.0)]);
        assert_eq!(tq_macroscopic(&s, &cfg()).unwrap(), 0.0);
        // population sigma 4.71405, mean 3.33333
        let s = scene(vec![agent(1, 0.0, 0.0, 0.0), agent(2, 50.0, 0.0, 0.0), agent(3, 90.0, 0.0, 10.0)]);
        assert!((tq_macroscopic(&s, &cfg()).unwrap() - core::f64::consts::SQRT_2).abs() < 1e-12);
        let s = scene(vec![agent(1, 0.0, 0.0, 0.0), agent(2, 5.0, 0.0, 0.0)]);
        assert_eq!(tq_macroscopic(&s, &cfg()).unwrap(), 0.0);
        assert!(matches!(tq_macroscopic(&scene(vec![]), &cfg()), Err(Error::EmptyScene { .. })));
    }

    #[test]
    fn metascopic_examples() {
        let standing = scene(vec![agent(1, 0.0, 0.0, 0.0), agent(2, 1.0, 0.0, 0.0)]);
        assert_eq!(tq_metascopic(&standing, AgentId(1), &cfg()).unwrap(), 0.0);
        let all_in = scene(vec![agent(1, 0.0, 0.0, 10.0), agent(2, 5.0, 0.0, 0.0), agent(3, 0.0, 8.0, 3.0)]);
        assert_eq!(tq_metascopic(&all_in, AgentId(1), &cfg()).unwrap(), 1.0);
        // braking distance 12.5 m: two of eight adversaries inside
        let mut agents = vec![agent(1, 0.0, 0.0, 10.0), agent(2, 5.0, 0.0, 0.0), agent(3, -12.0, 0.0, 0.0)];
        agents.extend((0..6).map(|k| agent(10 + k, 30.0 + 10.0 * k as f64, 0.0, 0.0)));
        assert_eq!(tq_metascopic(&scene(agents), AgentId(1), &cfg()).unwrap(), 0.25);
        let alone = scene(vec![agent(1, 0.0, 0.0, 10.0)]);
        assert_eq!(tq_metascopic(&alone, AgentId(1), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn mesoscopic_examples() {
        let far = scene(vec![agent(1, 0.0, 0.0, 10.0), agent(2, 100.0, 0.0, 0.0)]);
        assert_eq!(tq_mesoscopic(&far, AgentId(1), &cfg()).unwrap(), 0.0);
        let near = scene(vec![agent(1, 0.0, 0.0, 10.0), agent(2, 5.0, 0.0, 0.0)]);
        assert_eq!(tq_mesoscopic(&near, AgentId(1), &cfg()).unwrap(), 1.0);
        let equal = scene(vec![agent(1, 0.0, 0.0, 10.0), agent(2, 5.0, 0.0, 10.0), agent(3, 8.0, 1.0, 10.0)]);
        assert_eq!(tq_mesoscopic(&equal, AgentId(1), &cfg()).unwrap(), 0.0);
    }

    fn constant_track(speeds: impl Fn(i64) -> f64, frames: i64) -> ScenarioTrackset {
        let states =
            (0..frames).map(|k| AgentState::new(1, k * 100, Vec2::new(0.0, 0.0), Vec2::new(speeds(k), 0.0), 0.0));
        ScenarioTrackset::from_states(100, states).unwrap()
    }

    #[test]
    fn microscopic_examples() {
        let c = cfg();
        let ts = constant_track(|_| 50.0 / 3.6, 50);
        assert!((tq_microscopic(&ts, AgentId(1), 4000, &c).unwrap() - 0.5).abs() < 1e-12);
        let ts = constant_track(|_| 0.0, 50);
        assert_eq!(tq_microscopic(&ts, AgentId(1), 4000, &c).unwrap(), 0.0);
        // speed alternates 0 and 0.15, so |a| = 1.5 on every sample
        let ts = constant_track(|k| if k % 2 == 0 { 0.0 } else { 0.15 }, 50);
        let got = tq_microscopic(&ts, AgentId(1), 4000, &c).unwrap();
        // window holds 21 samples: 11 at speed 0 and 10 at 0.15
        let mean_speed = 10.0 * 0.15 / 21.0;
        assert!((got - (1.0 + mean_speed / c.v_ref) / 2.0).abs() < 1e-12, "{got}");
    }

    #[test]
    fn combined_examples() {
        assert_eq!(tq_combined([0.0; 4]), 0.0);
        assert_eq!(tq_combined([1.0, 0.0, 0.0, 0.0]), 1.0);
        assert_eq!(tq_combined([0.5; 4]), 1.0);
        let v = tq_combined([1.108, 0.4375, 1.403, 0.294]);
        assert!((v - 1.864).abs() < 0.002, "{v}");
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(Penalty::Rho1.factor(Some(1.5)), 1.0);
        assert!((Penalty::Rho2.factor(Some(5.0)) - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(Penalty::Rho3.factor(Some(1.0)), 1.0);
        assert_eq!(Penalty::None.factor(Some(0.3)), 1.0);
        for p in [Penalty::Rho1, Penalty::Rho2, Penalty::Rho3] {
            assert_eq!(p.factor(None), 0.0);
        }
        assert_eq!(Penalty::parse("RHO2"), Some(Penalty::Rho2));
        assert_eq!(Penalty::parse("rho4"), None);
    }

    #[test]
    fn lone_standing_ego() {
        let ts = constant_track(|_| 0.0, 5);
        let scene = &ts.frames()[4];
        let b = score_scene(&ts, scene, AgentId(1), &cfg()).unwrap();
        assert_eq!(b.tq_combined, 0.0);
        assert_eq!(b.tq_final, 0.0);
        assert_eq!(b.d_min, None);
        assert!(!b.critical);
    }

    #[test]
    fn rho2_final_is_product() {
        let states = (0..10).flat_map(|k| {
            [
                AgentState::new(1, k * 100, Vec2::new(k as f64, 0.0), Vec2::new(10.0, 0.0), 0.0),
                AgentState::new(2, k * 100, Vec2::new(6.0, 2.0), Vec2::new(0.0, 0.0), 0.0),
            ]
        });
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let out = score_all(&ts, &cfg()).unwrap();
        assert_eq!(out.len(), 20);
        for (_, _, b) in out {
            let d = b.d_min.unwrap();
            assert_eq!(b.tq_final, math::exp(-d / 5.0) * b.tq_combined);
            assert_eq!(b.critical, b.tq_final >= 1.0);
        }
    }

    #[test]
    fn score_all_counts_presence() {
        let states = [
            AgentState::new(1, 0, Vec2::ZERO, Vec2::ZERO, 0.0),
            AgentState::new(2, 0, Vec2::new(5.0, 0.0), Vec2::ZERO, 0.0),
            AgentState::new(1, 100, Vec2::ZERO, Vec2::ZERO, 0.0),
            AgentState::new(1, 200, Vec2::ZERO, Vec2::ZERO, 0.0),
            AgentState::new(2, 200, Vec2::new(5.0, 0.0), Vec2::ZERO, 0.0),
        ];
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let out = score_all(&ts, &cfg()).unwrap();
        let keys: Vec<_> = out.iter().map(|(t, id, _)| (*t, id.0)).collect();
        assert_eq!(keys, vec![(0, 1), (0, 2), (100, 1), (200, 1), (200, 2)]);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let bad = IutqConfig { v_ref: 0.0, ..cfg() };
        assert!(bad.validate().is_err());
        let bad = IutqConfig { braking: BrakingModel { decel: -1.0, reaction_time: 0.0 }, ..cfg() };
        assert!(bad.validate().is_err());
    }
}
