//! Planar geometry for vehicle footprints.

use core::ops::{Add, Mul, Neg, Sub};

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector pointing along `angle` (radians, counter-clockwise from +x).
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = math::sin_cos(angle);
        Vec2 { x: c, y: s }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::sqrt(self.norm_sq())
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2 { x: -self.y, y: self.x }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Rectangular vehicle outline, length along the heading.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Footprint {
    pub length: f64,
    pub width: f64,
}

impl Footprint {
    /// Returns `None` unless both sides are finite and strictly positive.
    pub fn new(length: f64, width: f64) -> Option<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        (ok(length) && ok(width)).then_some(Footprint { length, width })
    }

    /// Radius of the smallest disk around the center containing the rectangle.
    pub fn circumradius(&self) -> f64 {
        0.5 * math::sqrt(self.length * self.length + self.width * self.width)
    }
}

/// A footprint placed in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Vec2,
    /// Unit vector along the length.
    pub axis: Vec2,
    pub half_length: f64,
    pub half_width: f64,
}

impl OrientedRect {
    pub fn new(center: Vec2, heading: f64, footprint: Footprint) -> Self {
        OrientedRect {
            center,
            axis: Vec2::from_angle(heading),
            half_length: 0.5 * footprint.length,
            half_width: 0.5 * footprint.width,
        }
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Vec2; 4] {
        let u = self.axis * self.half_length;
        let v = self.axis.perp() * self.half_width;
        let c = self.center;
        [c + u + v, c - u + v, c - u - v, c + u - v]
    }

    fn axes(&self) -> [Vec2; 2] {
        [self.axis, self.axis.perp()]
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        let mid = self.center.dot(axis);
        let r = self.half_length * self.axis.dot(axis).abs() + self.half_width * self.axis.perp().dot(axis).abs();
        (mid - r, mid + r)
    }

    /// Separating-axis test; touching rectangles count as overlapping.
    pub fn overlaps(&self, other: &OrientedRect) -> bool {
        self.axes().into_iter().chain(other.axes()).all(|axis| {
            let (a0, a1) = self.project(axis);
            let (b0, b1) = other.project(axis);
            a0 <= b1 && b0 <= a1
        })
    }

    /// Minimum Euclidean distance between the two rectangles, 0 when they
    /// overlap.
    pub fn distance(&self, other: &OrientedRect) -> f64 {
        if self.overlaps(other) {
            return 0.0;
        }
        // For disjoint convex polygons the closest pair always involves a
        // vertex of one polygon.
        let a = self.corners();
        let b = other.corners();
        let mut best = f64::INFINITY;
        for i in 0..4 {
            let (b0, b1) = (b[i], b[(i + 1) % 4]);
            let (a0, a1) = (a[i], a[(i + 1) % 4]);
            for j in 0..4 {
                best = best.min(point_segment_distance_sq(a[j], b0, b1));
                best = best.min(point_segment_distance_sq(b[j], a0, a1));
            }
        }
        math::sqrt(best)
    }
}

/// Axis-aligned square `[x0, x0 + size] x [y0, y0 + size]`.
pub(crate) fn rect_overlaps_square(rect: &OrientedRect, x0: f64, y0: f64, size: f64) -> bool {
    let half = 0.5 * size;
    let square = OrientedRect {
        center: Vec2::new(x0 + half, y0 + half),
        axis: Vec2::new(1.0, 0.0),
        half_length: half,
        half_width: half,
    };
    rect.overlaps(&square)
}

fn point_segment_distance_sq(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    let t = if len_sq > 0.0 { ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0) } else { 0.0 };
    (p - (a + ab * t)).norm_sq()
}

/// Wraps an angle into `[-pi, pi]`.
pub fn normalize_angle(angle: f64) -> f64 {
    if (-core::f64::consts::PI..=core::f64::consts::PI).contains(&angle) {
        angle
    } else {
        let (s, c) = math::sin_cos(angle);
        math::atan2(s, c)
    }
}
