//! Brute-force reference computations.
//!
//! Nothing here calls the production geometry or metric code: rectangles are
//! rebuilt from raw fields, gaps come from dense boundary sampling, WTTC
//! from bisection on the reachable-disk distance, and TTC from stepping a
//! constant-velocity rollout until the bodies touch.

use alloc::format;
use alloc::vec::Vec;

use crate::batch::MetricId;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scene::{AgentId, AgentState, ScenarioTrackset};
use crate::surrogate::{SurrogateConfig, SurrogateMetric};

fn corners(s: &AgentState, at: Vec2) -> Option<[Vec2; 4]> {
    let fp = s.footprint?;
    let (sin, cos) = (libm::sin(s.heading), libm::cos(s.heading));
    let (hl, hw) = (fp.length / 2.0, fp.width / 2.0);
    let local = [(hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw)];
    Some(local.map(|(x, y)| Vec2::new(at.x + x * cos - y * sin, at.y + x * sin + y * cos)))
}

fn dist(a: Vec2, b: Vec2) -> f64 {
    libm::hypot(a.x - b.x, a.y - b.y)
}

fn seg_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    dist(p, Vec2::new(a.x + t * dx, a.y + t * dy))
}

fn inside(p: Vec2, poly: &[Vec2; 4]) -> bool {
    // convex, counter-clockwise
    (0..4).all(|i| {
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) >= 0.0
    })
}

fn boundary_samples(poly: &[Vec2; 4], n: usize) -> Vec<Vec2> {
    let edge = |i: usize| dist(poly[i], poly[(i + 1) % 4]);
    let perimeter: f64 = (0..4).map(edge).sum();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = perimeter * k as f64 / n as f64;
        let mut i = 0;
        while i < 3 && s > edge(i) {
            s -= edge(i);
            i += 1;
        }
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        let t = if edge(i) > 0.0 { (s / edge(i)).min(1.0) } else { 0.0 };
        out.push(Vec2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    out.extend_from_slice(poly);
    out
}

fn distance_to_boundary(p: Vec2, poly: &[Vec2; 4]) -> f64 {
    (0..4).map(|i| seg_dist(p, poly[i], poly[(i + 1) % 4])).fold(f64::INFINITY, f64::min)
}

/// Body gap from `samples` boundary points per rectangle. Falls back to the
/// center distance when a footprint is missing.
pub fn sampled_gap(a: &AgentState, b: &AgentState, samples: usize) -> f64 {
    let (Some(pa), Some(pb)) = (corners(a, a.position), corners(b, b.position)) else {
        return dist(a.position, b.position);
    };
    let sa = boundary_samples(&pa, samples);
    let sb = boundary_samples(&pb, samples);
    if sa.iter().any(|p| inside(*p, &pb)) || sb.iter().any(|p| inside(*p, &pa)) {
        return 0.0;
    }
    let ab = sa.iter().map(|p| distance_to_boundary(*p, &pb)).fold(f64::INFINITY, f64::min);
    let ba = sb.iter().map(|p| distance_to_boundary(*p, &pa)).fold(f64::INFINITY, f64::min);
    ab.min(ba)
}

/// Exact distance between two placed rectangles via edge-pair checks.
fn body_distance(a: &AgentState, pa: Vec2, b: &AgentState, pb: Vec2) -> f64 {
    let (Some(ca), Some(cb)) = (corners(a, pa), corners(b, pb)) else {
        return dist(pa, pb);
    };
    if ca.iter().any(|p| inside(*p, &cb)) || cb.iter().any(|p| inside(*p, &ca)) {
        return 0.0;
    }
    let cross = |o: Vec2, p: Vec2, q: Vec2| (p.x - o.x) * (q.y - o.y) - (p.y - o.y) * (q.x - o.x);
    let mut best = f64::INFINITY;
    for i in 0..4 {
        let (a0, a1) = (ca[i], ca[(i + 1) % 4]);
        for j in 0..4 {
            let (b0, b1) = (cb[j], cb[(j + 1) % 4]);
            let d1 = cross(a0, a1, b0);
            let d2 = cross(a0, a1, b1);
            let d3 = cross(b0, b1, a0);
            let d4 = cross(b0, b1, a1);
            if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
                return 0.0;
            }
            best = best.min(seg_dist(a0, b0, b1)).min(seg_dist(a1, b0, b1));
            best = best.min(seg_dist(b0, a0, a1)).min(seg_dist(b1, a0, a1));
        }
    }
    best
}

fn radius(s: &AgentState) -> f64 {
    s.footprint.map_or(0.0, |f| libm::hypot(f.length, f.width) / 2.0)
}

/// First `t >= 0` at which the worst-case reachable disks touch, by
/// bisection to `1e-12` s.
pub fn wttc_bisection(a: &AgentState, b: &AgentState, a_max: f64) -> Option<f64> {
    let sa = libm::hypot(a.velocity.x, a.velocity.y);
    let sb = libm::hypot(b.velocity.x, b.velocity.y);
    let gap = |t: f64| {
        let reach = (sa + sb) * t + a_max * t * t + radius(a) + radius(b);
        dist(a.position, b.position) - reach
    };
    if gap(0.0) <= 0.0 {
        return Some(0.0);
    }
    let mut hi = 1.0;
    while gap(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return None;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// Steps both agents at constant velocity in increments of `dt` seconds and
/// returns the first step time at which the bodies touch or the reference
/// points have passed each other. `None` if that does not happen within
/// `horizon` seconds.
pub fn ttc_rollout(a: &AgentState, b: &AgentState, dt: f64, horizon: f64) -> Option<f64> {
    let d0 = Vec2::new(b.position.x - a.position.x, b.position.y - a.position.y);
    let steps = libm::ceil(horizon / dt) as i64;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let pa = Vec2::new(a.position.x + a.velocity.x * t, a.position.y + a.velocity.y * t);
        let pb = Vec2::new(b.position.x + b.velocity.x * t, b.position.y + b.velocity.y * t);
        let rel = Vec2::new(pb.x - pa.x, pb.y - pa.y);
        if body_distance(a, pa, b, pb) <= 1e-9 || rel.x * d0.x + rel.y * d0.y <= 0.0 {
            return Some(t);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub timestamp_ms: i64,
    pub ego: AgentId,
    pub adversary: AgentId,
    pub value: Option<f64>,
}

/// Largest scenario the reference accepts.
pub const MAX_AGENTS: usize = 5;
pub const MAX_FRAMES: usize = 100;

/// Recomputes a metric for every ordered pair of every frame. Supports
/// `dist` (10,000 samples per rectangle), `wttc` and `ttc`.
pub fn brute_force_reference(
    metric: MetricId,
    ts: &ScenarioTrackset,
    config: &SurrogateConfig,
) -> Result<Vec<OracleValue>> {
    if ts.agent_count() > MAX_AGENTS || ts.frames().len() > MAX_FRAMES {
        return Err(Error::InvalidSpec(format!(
            "reference scenarios are limited to {MAX_AGENTS} agents and {MAX_FRAMES} frames"
        )));
    }
    let dt = ts.frame_interval_ms() as f64 / 1000.0;
    let pair: fn(&AgentState, &AgentState, &SurrogateConfig, f64) -> Option<f64> = match metric {
        MetricId::Surrogate(SurrogateMetric::Dist) => |a, b, _, _| Some(sampled_gap(a, b, 10_000)),
        MetricId::Surrogate(SurrogateMetric::Wttc) => |a, b, c, _| wttc_bisection(a, b, c.a_max_wttc),
        MetricId::Surrogate(SurrogateMetric::Ttc) => |a, b, _, dt| ttc_rollout(a, b, dt, 60.0),
        other => return Err(Error::UnsupportedMetric(other.as_str().into())),
    };
    let mut out = Vec::new();
    for scene in ts.frames() {
        for a in scene.agents() {
            for b in scene.others(a.id) {
                out.push(OracleValue {
                    timestamp_ms: scene.timestamp_ms(),
                    ego: a.id,
                    adversary: b.id,
                    value: pair(a, b, config, dt),
                });
            }
        }
    }
    Ok(out)
}
