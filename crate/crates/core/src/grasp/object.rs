//! Minimal rigid-object response: semi-implicit Euler on the wrench, with
//! rotation integrated against an isotropic uniform-solid inertia. A
//! grasped object is attached kinematically by the replay engine instead
//! of being integrated, so this only has to make free fall, settling, and
//! slipping observable.

use nalgebra::{Point3, UnitQuaternion, Vector3};

use super::{GraspError, Wrench};
use crate::geometry::Shape;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectPose {
    pub position: Point3<f64>,
    pub orientation: UnitQuaternion<f64>,
}

/// A movable object: its collision shape in the body frame (centered on
/// the center of mass), pose, velocity, and contact parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidObjectState {
    pub shape: Shape,
    pub mass: f64,
    pub pose: ObjectPose,
    pub velocity: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
    pub mu: f64,
    pub k_spring: f64,
}

impl RigidObjectState {
    /// The collision shape placed at the current pose.
    pub fn world_shape(&self) -> Shape {
        transformed(&self.shape, &self.pose)
    }

    /// Isotropic moment of inertia: mean principal moment of the uniform
    /// solid primitive.
    pub fn inertia(&self) -> f64 {
        let m = self.mass;
        match &self.shape {
            Shape::Sphere { radius, .. } => 0.4 * m * radius * radius,
            Shape::Box { half_extents, .. } => {
                let l = half_extents * 2.0;
                let ix = m / 12.0 * (l.y * l.y + l.z * l.z);
                let iy = m / 12.0 * (l.x * l.x + l.z * l.z);
                let iz = m / 12.0 * (l.x * l.x + l.y * l.y);
                (ix + iy + iz) / 3.0
            }
            Shape::Cylinder { radius, height, .. } => {
                let ia = 0.5 * m * radius * radius;
                let ip = m / 12.0 * (3.0 * radius * radius + height * height);
                (ia + 2.0 * ip) / 3.0
            }
            // Half-spaces are environment geometry and never integrate.
            Shape::HalfSpace { .. } => f64::INFINITY,
        }
    }
}

fn transformed(shape: &Shape, pose: &ObjectPose) -> Shape {
    let r = pose.orientation;
    let t = pose.position.coords;
    match shape {
        Shape::Sphere { center, radius } => Shape::Sphere {
            center: Point3::from(r.transform_vector(&center.coords) + t),
            radius: *radius,
        },
        Shape::Box {
            center,
            half_extents,
            orientation,
        } => Shape::Box {
            center: Point3::from(r.transform_vector(&center.coords) + t),
            half_extents: *half_extents,
            orientation: r * orientation,
        },
        Shape::Cylinder {
            base,
            axis,
            radius,
            height,
        } => Shape::Cylinder {
            base: Point3::from(r.transform_vector(&base.coords) + t),
            axis: r.transform_vector(axis),
            radius: *radius,
            height: *height,
        },
        Shape::HalfSpace { point, normal } => Shape::HalfSpace {
            point: Point3::from(r.transform_vector(&point.coords) + t),
            normal: r.transform_vector(normal),
        },
    }
}

/// One semi-implicit Euler step under the applied wrench (gravity included
/// by the caller). dt must lie in (0, 0.01].
pub fn step_object(
    obj: &RigidObjectState,
    w: &Wrench,
    dt: f64,
) -> Result<RigidObjectState, GraspError> {
    if !(dt > 0.0 && dt <= 0.01) {
        return Err(GraspError::BadDt(dt));
    }
    let mut next = obj.clone();
    next.velocity += w.force / obj.mass * dt;
    next.pose.position += next.velocity * dt;
    let inertia = obj.inertia();
    if inertia.is_finite() && inertia > 0.0 {
        next.angular_velocity += w.moment / inertia * dt;
        next.pose.orientation =
            UnitQuaternion::from_scaled_axis(next.angular_velocity * dt) * obj.pose.orientation;
    }
    Ok(next)
}
