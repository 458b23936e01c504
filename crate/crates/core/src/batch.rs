//! One entry point for all eleven compared metrics, frame by frame.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::iutq::{self, IutqConfig, Penalty};
use crate::scene::{AgentId, ScenarioTrackset};
use crate::surrogate::{SurrogateConfig, SurrogateMetric, SurrogateScorer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MetricId {
    Surrogate(SurrogateMetric),
    Iutq(Penalty),
}

impl MetricId {
    /// Comparison table column order: the seven baselines, then the three
    /// penalized scores, then the unpenalized one.
    pub const ALL: [MetricId; 11] = [
        MetricId::Surrogate(SurrogateMetric::Dist),
        MetricId::Surrogate(SurrogateMetric::Et),
        MetricId::Surrogate(SurrogateMetric::Gt),
        MetricId::Surrogate(SurrogateMetric::Pet),
        MetricId::Surrogate(SurrogateMetric::Pttc),
        MetricId::Surrogate(SurrogateMetric::Ttc),
        MetricId::Surrogate(SurrogateMetric::Wttc),
        MetricId::Iutq(Penalty::Rho1),
        MetricId::Iutq(Penalty::Rho2),
        MetricId::Iutq(Penalty::Rho3),
        MetricId::Iutq(Penalty::None),
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MetricId::Surrogate(m) => m.as_str(),
            MetricId::Iutq(Penalty::None) => "iutq-co",
            MetricId::Iutq(Penalty::Rho1) => "iutq-rho1",
            MetricId::Iutq(Penalty::Rho2) => "iutq-rho2",
            MetricId::Iutq(Penalty::Rho3) => "iutq-rho3",
        }
    }

    pub fn is_surrogate(&self) -> bool {
        matches!(self, MetricId::Surrogate(_))
    }

    /// IUTQ scores are critical at or above the threshold, surrogate values
    /// strictly below it. Undefined values are never critical.
    pub fn is_critical_at(&self, value: Option<f64>, threshold: f64) -> bool {
        match self {
            MetricId::Iutq(_) => value.is_some_and(|v| v >= threshold),
            MetricId::Surrogate(_) => value.is_some_and(|v| v < threshold),
        }
    }

    /// Position in [`MetricId::ALL`].
    pub fn table_index(&self) -> usize {
        MetricId::ALL.iter().position(|m| m == self).unwrap_or(usize::MAX)
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        MetricId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnsupportedMetric(s.into()))
    }
}

/// One value of one metric for one ego at one timestamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub timestamp_ms: i64,
    pub ego: AgentId,
    pub metric: MetricId,
    /// Undefined values are `None` and never critical.
    pub value: Option<f64>,
    pub critical: bool,
}

/// Scores requested metrics on the frames of one recording.
///
/// Holds only shared references and caches built at construction, so one
/// scorer can serve frames to any number of threads.
#[derive(Debug)]
pub struct FrameScorer<'a> {
    ts: &'a ScenarioTrackset,
    iutq: IutqConfig,
    metrics: Vec<MetricId>,
    surrogates: Option<SurrogateScorer<'a>>,
}

impl<'a> FrameScorer<'a> {
    /// `metrics` are emitted in the order given.
    pub fn new(
        ts: &'a ScenarioTrackset,
        iutq: IutqConfig,
        surrogate: SurrogateConfig,
        metrics: &[MetricId],
    ) -> Result<Self> {
        iutq.validate()?;
        let surrogates = if metrics.iter().any(MetricId::is_surrogate) {
            Some(SurrogateScorer::new(ts, surrogate)?)
        } else {
            surrogate.validate()?;
            None
        };
        Ok(FrameScorer { ts, iutq, metrics: metrics.to_vec(), surrogates })
    }

    pub fn trackset(&self) -> &ScenarioTrackset {
        self.ts
    }

    pub fn frame_count(&self) -> usize {
        self.ts.frames().len()
    }

    /// Rows for every ego of the frame (ascending), each with the requested
    /// metrics in request order.
    pub fn score_frame(&self, frame_index: usize) -> Result<Vec<MetricRow>> {
        let scene = &self.ts.frames()[frame_index];
        let t = scene.timestamp_ms();
        let breakdowns = if self.metrics.iter().any(|m| !m.is_surrogate()) {
            Some(iutq::score_frame(self.ts, frame_index, &self.iutq)?)
        } else {
            None
        };
        let surrogate = self.surrogates.as_ref().map(|s| s.score_frame(frame_index));
        let mut rows = Vec::with_capacity(scene.len() * self.metrics.len());
        for (ei, ego) in scene.agents().iter().enumerate() {
            for &metric in &self.metrics {
                let (value, critical) = match metric {
                    MetricId::Iutq(p) => {
                        let b = &breakdowns.as_ref().expect("iutq breakdowns computed")[ei].1;
                        (Some(b.final_with(p)), b.critical_with(p, &self.iutq))
                    }
                    MetricId::Surrogate(m) => {
                        let v = &surrogate.as_ref().expect("surrogates computed")[ei * 7 + m as usize];
                        debug_assert_eq!((v.ego, v.metric), (ego.id, m));
                        (v.value, v.critical)
                    }
                };
                rows.push(MetricRow { timestamp_ms: t, ego: ego.id, metric, value, critical });
            }
        }
        Ok(rows)
    }

    /// Sequential pass over all frames, ordered by timestamp, ego, metric.
    pub fn score_all(&self) -> Result<Vec<MetricRow>> {
        let mut out = Vec::new();
        for i in 0..self.frame_count() {
            out.extend(self.score_frame(i)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scene::AgentState;

    #[test]
    fn ids_round_trip() {
        for m in MetricId::ALL {
            assert_eq!(m.as_str().parse::<MetricId>().unwrap(), m);
            assert_eq!(MetricId::ALL[m.table_index()], m);
        }
        assert!("iutq".parse::<MetricId>().is_err());
    }

    #[test]
    fn rows_cover_every_agent_frame() {
        let states = (0..3).flat_map(|k| {
            [
                AgentState::new(1, k * 100, Vec2::new(k as f64, 0.0), Vec2::new(10.0, 0.0), 0.0),
                AgentState::new(2, k * 100, Vec2::new(20.0, 1.0), Vec2::new(-5.0, 0.0), 0.0),
            ]
        });
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let metrics = [MetricId::Iutq(Penalty::Rho2), MetricId::Surrogate(SurrogateMetric::Ttc)];
        let scorer = FrameScorer::new(&ts, IutqConfig::default(), SurrogateConfig::default(), &metrics).unwrap();
        let rows = scorer.score_all().unwrap();
        assert_eq!(rows.len(), 2 * 3 * 2);
        assert_eq!(rows[0].metric, metrics[0]);
        assert_eq!(rows[1].metric, metrics[1]);
        assert!(rows.iter().filter(|r| r.metric == metrics[1]).all(|r| r.value.is_some()));
        assert_eq!(rows, scorer.score_all().unwrap());
    }
}
