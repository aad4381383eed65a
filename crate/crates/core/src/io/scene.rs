//! Declarative scene configuration: objects with shapes and contact
//! parameters, fingertip radii, actuator limits, and grasp thresholds.
//! Parsing is strict — unknown keys are errors — and the only defaults are
//! the documented ones.

use nalgebra::{Point3, UnitQuaternion, Vector3};
use serde::Deserialize;

use super::FormatError;
use crate::device;
use crate::geometry::Shape;
use crate::grasp::{ObjectPose, RigidObjectState};

/// Default fingertip pad radius, mm (half a typical finger width).
pub const DEFAULT_TIP_RADIUS_MM: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    /// Per-finger pad radii, meters (thumb..little).
    pub fingertip_radii: [f64; 5],
    pub actuator: ActuatorConfig,
    pub thresholds: Thresholds,
    pub gravity: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub name: String,
    /// Collision shape in the body frame, centered on the center of mass.
    pub shape: Shape,
    pub mass: f64,
    pub k_spring: f64,
    pub mu: f64,
    pub k_material: f64,
    pub pose: ObjectPose,
    /// Fixed objects never integrate; fixed half-spaces support movable
    /// objects (floors, walls).
    pub fixed: bool,
}

impl SceneObject {
    pub fn to_state(&self) -> RigidObjectState {
        RigidObjectState {
            shape: self.shape.clone(),
            mass: self.mass,
            pose: self.pose,
            velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
            mu: self.mu,
            k_spring: self.k_spring,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorConfig {
    pub peaks: [f64; 3],
    pub slew: f64,
    pub tick_rate: u32,
}

impl Default for ActuatorConfig {
    fn default() -> Self {
        Self {
            peaks: device::DEFAULT_PEAKS,
            slew: device::DEFAULT_SLEW,
            tick_rate: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub force_threshold: f64,
    pub lift_height: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            force_threshold: 0.5,
            lift_height: 0.02,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneDoc {
    #[serde(default)]
    gravity: Option<[f64; 3]>,
    #[serde(default)]
    fingertip_radii_mm: Option<[f64; 5]>,
    #[serde(default)]
    actuator: Option<ActuatorDoc>,
    #[serde(default)]
    thresholds: Option<ThresholdsDoc>,
    objects: Vec<ObjectDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuatorDoc {
    #[serde(default)]
    peaks: Option<[f64; 3]>,
    #[serde(default)]
    slew: Option<f64>,
    #[serde(default)]
    tick_rate: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdsDoc {
    #[serde(default)]
    force_threshold: Option<f64>,
    #[serde(default)]
    lift_height: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectDoc {
    name: String,
    kind: String,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    half_extents: Option<[f64; 3]>,
    #[serde(default)]
    height: Option<f64>,
    #[serde(default)]
    axis: Option<[f64; 3]>,
    #[serde(default)]
    normal: Option<[f64; 3]>,
    #[serde(default)]
    mass: Option<f64>,
    #[serde(default)]
    k_spring: Option<f64>,
    #[serde(default)]
    mu: Option<f64>,
    #[serde(default)]
    k_material: Option<f64>,
    position: [f64; 3],
    #[serde(default)]
    orientation_rpy: Option<[f64; 3]>,
    #[serde(default)]
    fixed: Option<bool>,
}

fn err(message: impl Into<String>) -> FormatError {
    FormatError::Scene(message.into())
}

/// Parse a TOML scene document. Defaults: gravity (0, 0, -9.81) m/s2,
/// fingertip radii 8 mm, actuator peaks 10.4/10.1/10.2 N with 500 N/s slew
/// at 1000 Hz, force threshold 0.5 N, lift height 0.02 m, object mass 1 kg,
/// k_spring 1000 N/m, mu 0.5, k_material 1, identity orientation, movable.
pub fn parse_scene(text: &str) -> Result<Scene, FormatError> {
    let doc: SceneDoc = toml::from_str(text).map_err(|e| err(e.to_string()))?;
    if doc.objects.is_empty() {
        return Err(err("scene must declare at least one object"));
    }

    let gravity = doc
        .gravity
        .map(|g| Vector3::new(g[0], g[1], g[2]))
        .unwrap_or_else(|| Vector3::new(0.0, 0.0, -9.81));

    let radii_mm = doc.fingertip_radii_mm.unwrap_or([DEFAULT_TIP_RADIUS_MM; 5]);
    let mut fingertip_radii = [0.0; 5];
    for (i, mm) in radii_mm.iter().enumerate() {
        if *mm <= 0.0 {
            return Err(err(format!("fingertip_radii_mm[{i}] must be > 0, got {mm}")));
        }
        fingertip_radii[i] = mm * 1e-3;
    }

    let actuator = {
        let base = ActuatorConfig::default();
        let a = doc.actuator.unwrap_or(ActuatorDoc {
            peaks: None,
            slew: None,
            tick_rate: None,
        });
        let cfg = ActuatorConfig {
            peaks: a.peaks.unwrap_or(base.peaks),
            slew: a.slew.unwrap_or(base.slew),
            tick_rate: a.tick_rate.unwrap_or(base.tick_rate),
        };
        if cfg.peaks.iter().any(|&p| p <= 0.0) {
            return Err(err("actuator peaks must be > 0"));
        }
        if cfg.slew <= 0.0 {
            return Err(err("actuator slew must be > 0"));
        }
        if cfg.tick_rate == 0 {
            return Err(err("actuator tick_rate must be > 0"));
        }
        cfg
    };

    let thresholds = {
        let base = Thresholds::default();
        let t = doc.thresholds.unwrap_or(ThresholdsDoc {
            force_threshold: None,
            lift_height: None,
        });
        let cfg = Thresholds {
            force_threshold: t.force_threshold.unwrap_or(base.force_threshold),
            lift_height: t.lift_height.unwrap_or(base.lift_height),
        };
        if cfg.force_threshold <= 0.0 {
            return Err(err("force_threshold must be > 0"));
        }
        if cfg.lift_height <= 0.0 {
            return Err(err("lift_height must be > 0"));
        }
        cfg
    };

    let mut objects = Vec::new();
    for o in &doc.objects {
        objects.push(parse_object(o)?);
    }

    Ok(Scene {
        objects,
        fingertip_radii,
        actuator,
        thresholds,
        gravity,
    })
}

fn parse_object(o: &ObjectDoc) -> Result<SceneObject, FormatError> {
    let name = &o.name;
    let require = |field: &str, v: Option<f64>| {
        v.ok_or_else(|| err(format!("object `{name}`: {} requires `{field}`", o.kind)))
    };
    let shape = match o.kind.as_str() {
        "sphere" => Shape::Sphere {
            center: Point3::origin(),
            radius: require("radius", o.radius)?,
        },
        "box" => {
            let h = o
                .half_extents
                .ok_or_else(|| err(format!("object `{name}`: box requires `half_extents`")))?;
            Shape::Box {
                center: Point3::origin(),
                half_extents: Vector3::new(h[0], h[1], h[2]),
                orientation: UnitQuaternion::identity(),
            }
        }
        "cylinder" => {
            let axis = o.axis.unwrap_or([0.0, 0.0, 1.0]);
            let axis = Vector3::new(axis[0], axis[1], axis[2]);
            let height = require("height", o.height)?;
            Shape::Cylinder {
                // Body frame centered on the center of mass.
                base: Point3::from(-axis * (height / 2.0)),
                axis,
                radius: require("radius", o.radius)?,
                height,
            }
        }
        "halfspace" => {
            let n = o.normal.unwrap_or([0.0, 0.0, 1.0]);
            Shape::HalfSpace {
                point: Point3::origin(),
                normal: Vector3::new(n[0], n[1], n[2]),
            }
        }
        other => return Err(err(format!("object `{name}`: unknown kind `{other}`"))),
    };
    shape
        .validate()
        .map_err(|e| err(format!("object `{name}`: {e}")))?;

    let fixed = o.fixed.unwrap_or(false) || matches!(shape, Shape::HalfSpace { .. });
    let mass = o.mass.unwrap_or(1.0);
    let k_spring = o.k_spring.unwrap_or(1000.0);
    let mu = o.mu.unwrap_or(0.5);
    let k_material = o.k_material.unwrap_or(1.0);
    if mass <= 0.0 {
        return Err(err(format!("object `{name}`: mass must be > 0, got {mass}")));
    }
    if k_spring <= 0.0 {
        return Err(err(format!(
            "object `{name}`: k_spring must be > 0, got {k_spring}"
        )));
    }
    if mu < 0.0 {
        return Err(err(format!("object `{name}`: mu must be >= 0, got {mu}")));
    }
    if k_material <= 0.0 {
        return Err(err(format!(
            "object `{name}`: k_material must be > 0, got {k_material}"
        )));
    }

    let rpy = o.orientation_rpy.unwrap_or([0.0, 0.0, 0.0]);
    Ok(SceneObject {
        name: name.clone(),
        shape,
        mass,
        k_spring,
        mu,
        k_material,
        pose: ObjectPose {
            position: Point3::new(o.position[0], o.position[1], o.position[2]),
            orientation: UnitQuaternion::from_euler_angles(rpy[0], rpy[1], rpy[2]),
        },
        fixed,
    })
}
