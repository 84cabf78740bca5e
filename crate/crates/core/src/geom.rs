//! Planar vectors, segments and the base-station pose.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    /// Rotation by -90 degrees: +y maps to +x.
    pub fn rot_cw90(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
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

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Vec2,
    pub b: Vec2,
}

impl Segment {
    pub const fn new(a: Vec2, b: Vec2) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }
}

const COLLINEAR_EPS: f64 = 1e-12;

/// Intersection of segments `p0→p1` and `q0→q1`, endpoints included.
///
/// Returns the parameters `(t, s)` of the hit along each segment. For
/// collinear overlaps the hit with the smallest `t` is reported.
pub fn segment_intersection(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> Option<(f64, f64)> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let qp = q0 - p0;
    let scale = r.norm() * s.norm();
    if denom.abs() <= COLLINEAR_EPS * scale.max(f64::MIN_POSITIVE) {
        if qp.cross(r).abs() > COLLINEAR_EPS * r.norm() * qp.norm().max(1.0) {
            return None;
        }
        let rr = r.dot(r);
        if rr == 0.0 {
            return None;
        }
        let t0 = qp.dot(r) / rr;
        let t1 = (q1 - p0).dot(r) / rr;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        if hi < 0.0 || lo > 1.0 {
            return None;
        }
        let t = lo.max(0.0);
        let ss = s.dot(s);
        let sp = if ss == 0.0 { 0.0 } else { (p0 + r * t - q0).dot(s) / ss };
        return Some((t, sp.clamp(0.0, 1.0)));
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// Mirror image of `p` across the infinite line through `a` and `b`.
pub fn mirror_point(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let d = (b - a).normalized();
    let foot = a + d * (p - a).dot(d);
    foot * 2.0 - p
}

/// Position and pointing of the base-station array.
///
/// Angles are measured from boresight, positive toward the boresight
/// rotated by -90 degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub position: Vec2,
    pub boresight: Vec2,
}

impl Pose {
    pub fn new(position: Vec2, boresight: Vec2) -> Self {
        Pose {
            position,
            boresight: boresight.normalized(),
        }
    }

    pub fn normal(&self) -> Vec2 {
        self.boresight.rot_cw90()
    }

    pub fn angle_to(&self, p: Vec2) -> f64 {
        let v = p - self.position;
        v.dot(self.normal()).atan2(v.dot(self.boresight))
    }

    pub fn point_at(&self, range: f64, angle: f64) -> Vec2 {
        self.position + (self.normal() * angle.sin() + self.boresight * angle.cos()) * range
    }
}
