//! Time-to-collision family on a single pair of states.

use crate::math;
use crate::scene::{center_distance, gap_distance, AgentState};

/// Rate at which the center distance shrinks under constant velocities, m/s.
/// Positive when approaching. `None` when the centers coincide.
pub fn closing_speed(ego: &AgentState, adversary: &AgentState) -> Option<f64> {
    let d = adversary.position - ego.position;
    let dist = d.norm();
    if dist == 0.0 {
        return None;
    }
    let w = adversary.velocity - ego.velocity;
    Some(-d.dot(w) / dist)
}

/// Body gap over closing speed. Undefined unless the pair is closing;
/// 0 when the reference points coincide.
pub fn ttc(ego: &AgentState, adversary: &AgentState) -> Option<f64> {
    if center_distance(ego, adversary) == 0.0 {
        return Some(0.0);
    }
    let closing = closing_speed(ego, adversary)?;
    (closing > 0.0).then(|| gap_distance(ego, adversary) / closing)
}

/// Smallest positive `t` with `decel/2 * t^2 + v_close * t = gap`, where
/// `decel` is the adversary's braking (m/s², non-negative). With zero
/// deceleration this is exactly [`ttc`].
pub fn pttc(ego: &AgentState, adversary: &AgentState, decel: f64) -> Option<f64> {
    let decel = decel.max(0.0);
    if decel == 0.0 {
        return ttc(ego, adversary);
    }
    if center_distance(ego, adversary) == 0.0 {
        return Some(0.0);
    }
    let closing = closing_speed(ego, adversary)?;
    let gap = gap_distance(ego, adversary);
    // Rationalized root: stays accurate when the quadratic term is tiny.
    let disc = closing * closing + 2.0 * decel * gap;
    let denom = closing + math::sqrt(disc);
    (denom > 0.0).then(|| 2.0 * gap / denom)
}

/// Worst-case time to collision: both agents may accelerate at `a_max` in
/// any direction, so each occupies a disk of radius
/// `speed * t + a_max / 2 * t^2 + circumradius` around its current center.
/// Returns the first `t >= 0` at which the disks touch; 0 when they already
/// do. Undefined only if nothing can move at all.
pub fn wttc(ego: &AgentState, adversary: &AgentState, a_max: f64) -> Option<f64> {
    let gap = center_distance(ego, adversary) - ego.circumradius() - adversary.circumradius();
    if gap <= 0.0 {
        return Some(0.0);
    }
    let s = ego.speed() + adversary.speed();
    let a = a_max.max(0.0);
    // a t^2 + s t - gap = 0
    let denom = s + math::sqrt(s * s + 4.0 * a * gap);
    (denom > 0.0).then(|| 2.0 * gap / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    fn point(id: u64, x: f64, y: f64, vx: f64, vy: f64) -> AgentState {
        AgentState::new(id, 0, Vec2::new(x, y), Vec2::new(vx, vy), 0.0)
    }

    #[test]
    fn ttc_examples() {
        assert_eq!(ttc(&point(1, 0.0, 0.0, 10.0, 0.0), &point(2, 30.0, 0.0, 0.0, 0.0)), Some(3.0));
        assert_eq!(ttc(&point(1, 0.0, 0.0, -1.0, 0.0), &point(2, 30.0, 0.0, 1.0, 0.0)), None);
        assert_eq!(ttc(&point(1, 0.0, 0.0, 5.0, 0.0), &point(2, 12.0, 0.0, -5.0, 0.0)), Some(1.2));
        // footprints shorten the gap, not the closing speed
        let a = point(1, 0.0, 0.0, 10.0, 0.0).with_footprint(4.0, 2.0);
        let b = point(2, 34.0, 0.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        assert_eq!(ttc(&a, &b), Some(3.0));
    }

    #[test]
    fn pttc_examples() {
        let a = point(1, 0.0, 0.0, 10.0, 0.0);
        let b = point(2, 30.0, 0.0, 0.0, 0.0);
        assert_eq!(pttc(&a, &b, 0.0), Some(3.0));
        let a = point(1, 0.0, 0.0, 5.0, 0.0);
        let b = point(2, 20.0, 0.0, 5.0, 0.0);
        let t = pttc(&a, &b, 2.0).unwrap();
        assert!((t - 20f64.sqrt()).abs() < 1e-12, "{t}");
        // diverging with no braking never closes
        let b = point(2, 20.0, 0.0, 8.0, 0.0);
        assert_eq!(pttc(&a, &b, 0.0), None);
    }

    #[test]
    fn wttc_examples() {
        let a = point(1, 0.0, 0.0, 0.0, 0.0);
        let b = point(2, 9.0, 0.0, 0.0, 0.0);
        let t = wttc(&a, &b, 2.0).unwrap();
        // 2 * (1/2 * 2 * t^2) = 9
        assert!((t - 4.5f64.sqrt()).abs() < 1e-12, "{t}");
        let a = point(1, 0.0, 0.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        let b = point(2, 3.0, 0.0, 0.0, 0.0).with_footprint(4.0, 2.0);
        assert_eq!(wttc(&a, &b, 7.0), Some(0.0));
        assert_eq!(wttc(&point(1, 0.0, 0.0, 0.0, 0.0), &point(2, 1.0, 0.0, 0.0, 0.0), 0.0), None);
    }

    #[test]
    fn wttc_not_after_ttc() {
        let a = point(1, 0.0, 0.0, 10.0, 0.0).with_footprint(4.5, 1.8);
        let b = point(2, 25.0, 3.0, -4.0, 0.0).with_footprint(4.5, 1.8);
        assert!(wttc(&a, &b, 7.0).unwrap() <= ttc(&a, &b).unwrap());
    }
}
