use super::TrajectoryConfig;
use crate::channel::Scene;
use crate::geom::{segment_intersection, Pose, Vec2};
use crate::waveform::nearest_beam_by_pointing;
use crate::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// True when the segment from `a` to `b` touches any obstacle, endpoints included.
pub fn los_blocked(scene: &Scene, a: Vec2, b: Vec2) -> bool {
    scene
        .obstacles
        .iter()
        .any(|o| segment_intersection(a, b, o.a, o.b).is_some())
}

/// Beam whose main lobe points at `ue`; positions behind the array are rejected.
pub fn location_based_beam(ue: Vec2, pose: &Pose, num_beams: usize, d_over_lambda: f64) -> Result<usize> {
    let v = ue - pose.position;
    if v.norm() == 0.0 {
        return Err(Error::Geometry("UE coincides with the base station".into()));
    }
    let theta = pose.angle_to(ue);
    if theta.abs() >= FRAC_PI_2 {
        return Err(Error::Geometry(format!(
            "UE at ({:.3}, {:.3}) lies behind the array",
            ue.x, ue.y
        )));
    }
    Ok(nearest_beam_by_pointing(theta, num_beams, d_over_lambda))
}

/// True when an obstacle segment meets the closed axis-aligned square.
pub fn cell_occupied(scene: &Scene, center: Vec2, size: f64) -> bool {
    let h = size / 2.0;
    let corners = [
        center + Vec2::new(-h, -h),
        center + Vec2::new(h, -h),
        center + Vec2::new(h, h),
        center + Vec2::new(-h, h),
    ];
    let inside = |p: Vec2| (p.x - center.x).abs() <= h && (p.y - center.y).abs() <= h;
    scene.obstacles.iter().any(|o| {
        inside(o.a)
            || inside(o.b)
            || (0..4).any(|k| segment_intersection(o.a, o.b, corners[k], corners[(k + 1) % 4]).is_some())
    })
}

/// One trajectory sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t_s: f64,
    pub position: Vec2,
    pub velocity: Vec2,
}

/// Constant-speed traversal of the waypoint polyline sampled every period;
/// the final waypoint is always included.
pub fn sample_trajectory(t: &TrajectoryConfig) -> Vec<TrajectoryPoint> {
    let w = &t.waypoints;
    if w.len() == 1 {
        return vec![TrajectoryPoint {
            t_s: 0.0,
            position: w[0],
            velocity: Vec2::default(),
        }];
    }
    let legs: Vec<f64> = w.windows(2).map(|p| p[0].distance(p[1])).collect();
    let total: f64 = legs.iter().sum();
    let step = t.speed_mps * t.sample_period_s;
    // Tolerate round-off so an exact multiple lands on the final waypoint.
    let n = (total / step + 1e-9).floor() as usize;
    let at = |s: f64| {
        let mut rem = s;
        for (k, &len) in legs.iter().enumerate() {
            if rem <= len || k == legs.len() - 1 {
                let dir = if len > 0.0 {
                    (w[k + 1] - w[k]) * (1.0 / len)
                } else {
                    Vec2::default()
                };
                return (w[k] + dir * rem.min(len), dir * t.speed_mps);
            }
            rem -= len;
        }
        unreachable!("polyline has at least one leg")
    };
    let mut out: Vec<TrajectoryPoint> = (0..=n)
        .map(|k| {
            let (position, velocity) = at(k as f64 * step);
            TrajectoryPoint {
                t_s: k as f64 * t.sample_period_s,
                position,
                velocity,
            }
        })
        .collect();
    let last = *w.last().expect("nonempty");
    if out.last().is_some_and(|p| p.position.distance(last) > 1e-9) {
        let (_, velocity) = at(total);
        out.push(TrajectoryPoint {
            t_s: total / t.speed_mps,
            position: last,
            velocity,
        });
    }
    out
}
