use crate::geom::{Pose, Segment, Vec2};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Ue,
    StaticScatterer,
    DynamicObstacle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub kind: TargetKind,
    pub position: Vec2,
    #[serde(default)]
    pub velocity: Vec2,
    pub rcs_m2: f64,
}

impl Target {
    pub fn stationary(kind: TargetKind, position: Vec2, rcs_m2: f64) -> Self {
        Target {
            kind,
            position,
            velocity: Vec2::default(),
            rcs_m2,
        }
    }
}

/// Reference direction for a reflector's orientation angle, measured from +x.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationSense {
    #[default]
    Ccw,
    Cw,
}

/// Flat specular segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reflector {
    pub center: Vec2,
    pub width_m: f64,
    pub angle_deg: f64,
    #[serde(default)]
    pub angle_sense: RotationSense,
    /// Amplitude reflection coefficient, serialized as `[re, im]`.
    pub reflection_coeff: C64,
}

impl Reflector {
    pub fn direction(&self) -> Vec2 {
        let a = self.angle_deg.to_radians();
        match self.angle_sense {
            RotationSense::Ccw => Vec2::new(a.cos(), a.sin()),
            RotationSense::Cw => Vec2::new(a.cos(), -a.sin()),
        }
    }

    pub fn segment(&self) -> Segment {
        let h = self.direction() * (0.5 * self.width_m);
        Segment::new(self.center - h, self.center + h)
    }
}

fn default_blockage_db() -> f64 {
    20.0
}

/// Opaque segment attenuating any ray that crosses it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub a: Vec2,
    pub b: Vec2,
    #[serde(default = "default_blockage_db")]
    pub blockage_loss_db: f64,
}

impl Obstacle {
    pub fn segment(&self) -> Segment {
        Segment::new(self.a, self.b)
    }
}

fn default_boresight() -> Vec2 {
    Vec2::new(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub bs_position: Vec2,
    #[serde(default = "default_boresight")]
    pub bs_boresight: Vec2,
    #[serde(default)]
    pub targets: Vec<Target>,
    #[serde(default)]
    pub reflectors: Vec<Reflector>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl Default for Scene {
    fn default() -> Self {
        Scene {
            bs_position: Vec2::default(),
            bs_boresight: default_boresight(),
            targets: Vec::new(),
            reflectors: Vec::new(),
            obstacles: Vec::new(),
        }
    }
}

impl Scene {
    pub fn pose(&self) -> Pose {
        Pose::new(self.bs_position, self.bs_boresight)
    }

    /// First violated invariant as (field path relative to the scene, message).
    pub fn check(&self) -> Result<(), (String, String)> {
        if !self.bs_position.is_finite() {
            return Err(("bs_position".into(), "must be finite".into()));
        }
        if !(self.bs_boresight.norm() > 0.0) || !self.bs_boresight.is_finite() {
            return Err(("bs_boresight".into(), "must be a nonzero finite vector".into()));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !(t.rcs_m2 > 0.0) || !t.rcs_m2.is_finite() {
                return Err((format!("targets[{i}].rcs_m2"), "must be positive".into()));
            }
            if !t.position.is_finite() || !t.velocity.is_finite() {
                return Err((format!("targets[{i}].position"), "must be finite".into()));
            }
            if t.kind == TargetKind::StaticScatterer && t.velocity != Vec2::default() {
                return Err((format!("targets[{i}].velocity"), "static scatterers cannot move".into()));
            }
        }
        for (i, r) in self.reflectors.iter().enumerate() {
            if !(r.width_m > 0.0) || !r.width_m.is_finite() {
                return Err((format!("reflectors[{i}].width_m"), "must be positive".into()));
            }
            if !(r.reflection_coeff.norm() <= 1.0) {
                return Err((
                    format!("reflectors[{i}].reflection_coeff"),
                    "magnitude must not exceed 1".into(),
                ));
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if !(o.blockage_loss_db >= 0.0) || !o.blockage_loss_db.is_finite() {
                return Err((
                    format!("obstacles[{i}].blockage_loss_db"),
                    "must be non-negative".into(),
                ));
            }
            if o.a.distance(o.b) == 0.0 {
                return Err((format!("obstacles[{i}]"), "zero-length obstacle".into()));
            }
        }
        Ok(())
    }
}
