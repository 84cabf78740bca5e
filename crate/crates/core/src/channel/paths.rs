use super::scene::{Scene, Target};
use crate::geom::{mirror_point, segment_intersection, Vec2};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Hits this close to a ray's own endpoints do not block it, so a target may
/// sit on the obstacle it represents.
const ENDPOINT_EPS: f64 = 1e-9;

/// Geometric ray between two points, direct or via one reflector.
#[derive(Clone, Debug, PartialEq)]
pub struct Ray {
    pub length_m: f64,
    pub blocked_db: f64,
    pub via_reflector: Option<usize>,
    /// Reflection point, or `None` for the direct ray.
    pub bounce: Option<Vec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathParams {
    /// One-way geometric length.
    pub geometric_length_m: f64,
    /// Departure angle at the base station from broadside.
    pub angle_rad: f64,
    /// One-way Doppler shift, positive when the path shortens.
    pub doppler_hz: f64,
    /// One-way amplitude and phase including blockage and reflection.
    pub complex_gain: C64,
    pub blocked_db: f64,
    pub via_reflector: Option<usize>,
}

fn blockage_db(scene: &Scene, a: Vec2, b: Vec2) -> f64 {
    scene
        .obstacles
        .iter()
        .filter(|o| {
            segment_intersection(a, b, o.a, o.b).is_some_and(|(t, _)| t > ENDPOINT_EPS && t < 1.0 - ENDPOINT_EPS)
        })
        .map(|o| o.blockage_loss_db)
        .sum()
}

/// Direct ray plus every unblocked single-bounce specular ray from `a` to `b`.
pub fn trace_rays(scene: &Scene, a: Vec2, b: Vec2) -> Vec<Ray> {
    let mut rays = vec![Ray {
        length_m: a.distance(b),
        blocked_db: blockage_db(scene, a, b),
        via_reflector: None,
        bounce: None,
    }];
    for (i, r) in scene.reflectors.iter().enumerate() {
        let seg = r.segment();
        let d = seg.b - seg.a;
        let side_a = d.cross(a - seg.a);
        let side_b = d.cross(b - seg.a);
        if side_a * side_b <= 0.0 {
            continue;
        }
        let image = mirror_point(b, seg.a, seg.b);
        let Some((t, _)) = segment_intersection(a, image, seg.a, seg.b) else {
            continue;
        };
        if t <= ENDPOINT_EPS || t >= 1.0 - ENDPOINT_EPS {
            continue;
        }
        let p = a + (image - a) * t;
        if blockage_db(scene, a, p) > 0.0 || blockage_db(scene, p, b) > 0.0 {
            continue;
        }
        rays.push(Ray {
            length_m: a.distance(image),
            blocked_db: 0.0,
            via_reflector: Some(i),
            bounce: Some(p),
        });
    }
    rays
}

fn free_space_gain(length: f64, lambda: f64) -> C64 {
    let cycles = (length / lambda).fract();
    C64::from_polar(lambda / (4.0 * PI * length), -2.0 * PI * cycles)
}

/// Propagation paths between the base station and `terminal`.
pub fn compute_paths(scene: &Scene, terminal: &Target, wavelength: f64) -> Result<Vec<PathParams>> {
    let bs = scene.bs_position;
    if bs.distance(terminal.position) < 1e-9 {
        return Err(Error::Geometry("terminal coincides with the base station".into()));
    }
    let pose = scene.pose();
    Ok(trace_rays(scene, bs, terminal.position)
        .into_iter()
        .map(|ray| {
            let (toward, velocity, reflection) = match (ray.via_reflector, ray.bounce) {
                (Some(i), Some(_)) => {
                    let r = &scene.reflectors[i];
                    let seg = r.segment();
                    let image = mirror_point(terminal.position, seg.a, seg.b);
                    let n = r.direction().rot_cw90();
                    let v = terminal.velocity - n * (2.0 * terminal.velocity.dot(n));
                    (image, v, r.reflection_coeff)
                }
                _ => (terminal.position, terminal.velocity, C64::new(1.0, 0.0)),
            };
            let u = (toward - bs).normalized();
            let blockage = 10f64.powf(-ray.blocked_db / 20.0);
            PathParams {
                geometric_length_m: ray.length_m,
                angle_rad: pose.angle_to(toward),
                doppler_hz: -u.dot(velocity) / wavelength,
                complex_gain: free_space_gain(ray.length_m, wavelength) * reflection * blockage,
                blocked_db: ray.blocked_db,
                via_reflector: ray.via_reflector,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::super::scene::{Obstacle, Reflector, RotationSense, TargetKind};
    use super::*;

    fn ue(x: f64, y: f64) -> Target {
        Target::stationary(TargetKind::Ue, Vec2::new(x, y), 0.5)
    }

    #[test]
    fn boresight_los() {
        let scene = Scene::default();
        let p = compute_paths(&scene, &ue(0.0, 5.0), 0.01).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].geometric_length_m - 5.0).abs() < 1e-12);
        assert!(p[0].angle_rad.abs() < 1e-12);
        assert!((p[0].complex_gain.norm() - 0.01 / (4.0 * PI * 5.0)).abs() < 1e-15);
        assert!(compute_paths(&scene, &ue(0.0, 0.0), 0.01).is_err());
    }

    #[test]
    fn crossing_obstacle_blocks() {
        let scene = Scene {
            obstacles: vec![Obstacle {
                a: Vec2::new(-1.0, 2.0),
                b: Vec2::new(1.0, 2.0),
                blockage_loss_db: 20.0,
            }],
            ..Scene::default()
        };
        let p = compute_paths(&scene, &ue(0.0, 5.0), 0.01).unwrap();
        assert_eq!(p[0].blocked_db, 20.0);
        let free = 0.01 / (4.0 * PI * 5.0);
        assert!((p[0].complex_gain.norm() - free / 10.0).abs() < 1e-15);
        let on_obstacle = compute_paths(&scene, &ue(0.5, 2.0), 0.01).unwrap();
        assert_eq!(on_obstacle[0].blocked_db, 0.0);
    }

    #[test]
    fn image_source_length() {
        let scene = Scene {
            reflectors: vec![Reflector {
                center: Vec2::new(5.0, 0.0),
                width_m: 4.0,
                angle_deg: 90.0,
                angle_sense: RotationSense::Ccw,
                reflection_coeff: C64::new(-0.5, 0.0),
            }],
            ..Scene::default()
        };
        let p = compute_paths(&scene, &ue(0.0, 2.0), 0.01).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p[1].geometric_length_m - 104f64.sqrt()).abs() < 1e-12);
        assert_eq!(p[1].via_reflector, Some(0));
        let expect = 0.5 * 0.01 / (4.0 * PI * 104f64.sqrt());
        assert!((p[1].complex_gain.norm() - expect).abs() < 1e-15);
    }

    #[test]
    fn approaching_target_has_positive_doppler() {
        let mut t = ue(0.0, 5.0);
        t.velocity = Vec2::new(0.0, -1.0);
        let p = compute_paths(&Scene::default(), &t, 0.01).unwrap();
        assert!((p[0].doppler_hz - 100.0).abs() < 1e-9);
    }
}
