use nalgebra::{Point3, Unit, UnitQuaternion, Vector3};
use std::f64::consts::PI;

use super::GeometryError;

const UNIT_TOL: f64 = 1e-9;

/// Convex collision primitives. Positions and extents are in meters; axis
/// and normal vectors must be unit-length within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Sphere {
        center: Point3<f64>,
        radius: f64,
    },
    Box {
        center: Point3<f64>,
        half_extents: Vector3<f64>,
        orientation: UnitQuaternion<f64>,
    },
    Cylinder {
        base: Point3<f64>,
        axis: Vector3<f64>,
        radius: f64,
        height: f64,
    },
    HalfSpace {
        point: Point3<f64>,
        normal: Vector3<f64>,
    },
}

impl Shape {
    pub fn validate(&self) -> Result<(), GeometryError> {
        match self {
            Shape::Sphere { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(GeometryError::InvalidShape(format!(
                        "sphere radius must be > 0, got {radius}"
                    )));
                }
            }
            Shape::Box { half_extents, .. } => {
                if half_extents.iter().any(|&h| h <= 0.0) {
                    return Err(GeometryError::InvalidShape(format!(
                        "box half extents must be > 0 componentwise, got {half_extents:?}"
                    )));
                }
            }
            Shape::Cylinder {
                axis,
                radius,
                height,
                ..
            } => {
                if *radius <= 0.0 || *height <= 0.0 {
                    return Err(GeometryError::InvalidShape(format!(
                        "cylinder radius and height must be > 0, got r={radius}, h={height}"
                    )));
                }
                if (axis.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(GeometryError::InvalidShape(format!(
                        "cylinder axis must be unit-length, |axis| = {}",
                        axis.norm()
                    )));
                }
            }
            Shape::HalfSpace { normal, .. } => {
                if (normal.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(GeometryError::InvalidShape(format!(
                        "half-space normal must be unit-length, |n| = {}",
                        normal.norm()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A fingertip pad modeled as a sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePose {
    pub center: Point3<f64>,
    pub radius: f64,
}

/// Result of a fingertip-object collision query.
///
/// `point` lies on the object surface, `normal` is the outward surface
/// normal there, `depth` is the penetration of the pad, and `area` is the
/// pad-object intersection circle area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub point: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
    pub depth: f64,
    pub area: f64,
}

/// Closest-point query result: `distance` is negative inside the shape,
/// `closest` is the nearest surface point, `normal` is outward at `closest`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceQuery {
    pub distance: f64,
    pub closest: Point3<f64>,
    pub normal: Unit<Vector3<f64>>,
}

/// Signed distance from `p` to the surface of `s`, with the nearest surface
/// point and the outward normal there. Ambiguous configurations (shape
/// centers, box edges/corners from inside) resolve by a fixed tie-break so
/// the query is total and deterministic.
pub fn signed_distance(p: &Point3<f64>, s: &Shape) -> DistanceQuery {
    match s {
        Shape::Sphere { center, radius } => {
            let v = p - center;
            let d = v.norm();
            // Center tie-break: +x.
            let normal = if d < 1e-12 {
                Unit::new_unchecked(Vector3::x())
            } else {
                Unit::new_unchecked(v / d)
            };
            DistanceQuery {
                distance: d - radius,
                closest: center + normal.as_ref() * *radius,
                normal,
            }
        }
        Shape::HalfSpace { point, normal } => {
            let n = Unit::new_normalize(*normal);
            let d = (p - point).dot(&n);
            DistanceQuery {
                distance: d,
                closest: p - n.as_ref() * d,
                normal: n,
            }
        }
        Shape::Box {
            center,
            half_extents,
            orientation,
        } => {
            let local = orientation.inverse_transform_vector(&(p - center));
            let clamped = Vector3::new(
                local.x.clamp(-half_extents.x, half_extents.x),
                local.y.clamp(-half_extents.y, half_extents.y),
                local.z.clamp(-half_extents.z, half_extents.z),
            );
            let delta = local - clamped;
            let dist = delta.norm();
            if dist > 0.0 {
                let n_local = delta / dist;
                return DistanceQuery {
                    distance: dist,
                    closest: center + orientation.transform_vector(&clamped),
                    normal: Unit::new_unchecked(orientation.transform_vector(&n_local)),
                };
            }
            // Inside (or exactly on the surface): face of minimal penetration;
            // ties resolved by max |local|/half_extent ratio, then axis order.
            let mut face = 0usize;
            let mut best_pen = f64::INFINITY;
            let mut best_ratio = -1.0;
            for a in 0..3 {
                let pen = half_extents[a] - local[a].abs();
                let ratio = local[a].abs() / half_extents[a];
                if pen < best_pen || (pen == best_pen && ratio > best_ratio) {
                    face = a;
                    best_pen = pen;
                    best_ratio = ratio;
                }
            }
            let sign = if local[face] >= 0.0 { 1.0 } else { -1.0 };
            let mut closest_local = local;
            closest_local[face] = sign * half_extents[face];
            let mut n_local = Vector3::zeros();
            n_local[face] = sign;
            DistanceQuery {
                distance: -best_pen,
                closest: center + orientation.transform_vector(&closest_local),
                normal: Unit::new_unchecked(orientation.transform_vector(&n_local)),
            }
        }
        Shape::Cylinder {
            base,
            axis,
            radius,
            height,
        } => {
            let a = Unit::new_normalize(*axis);
            let rel = p - base;
            let t = rel.dot(&a);
            let radial = rel - a.as_ref() * t;
            let rho = radial.norm();
            let rho_dir = if rho < 1e-12 {
                // On the axis: fixed perpendicular tie-break.
                let trial = if a.x.abs() < 0.9 {
                    Vector3::x()
                } else {
                    Vector3::y()
                };
                Unit::new_normalize(trial - a.as_ref() * trial.dot(&a))
            } else {
                Unit::new_unchecked(radial / rho)
            };

            if t < 0.0 || t > *height {
                // Beyond a cap plane.
                let (cap_t, cap_n) = if t < 0.0 {
                    (0.0, -a.into_inner())
                } else {
                    (*height, a.into_inner())
                };
                if rho <= *radius {
                    let closest = base + a.as_ref() * cap_t + radial;
                    let d = if t < 0.0 { -t } else { t - height };
                    DistanceQuery {
                        distance: d,
                        closest,
                        normal: Unit::new_unchecked(cap_n),
                    }
                } else {
                    // Outside the rim circle.
                    let closest = base + a.as_ref() * cap_t + rho_dir.as_ref() * *radius;
                    let diff = p - closest;
                    let d = diff.norm();
                    DistanceQuery {
                        distance: d,
                        closest,
                        normal: Unit::new_normalize(diff),
                    }
                }
            } else if rho >= *radius {
                DistanceQuery {
                    distance: rho - radius,
                    closest: base + a.as_ref() * t + rho_dir.as_ref() * *radius,
                    normal: rho_dir,
                }
            } else {
                // Interior: nearest of side wall, bottom cap, top cap.
                let side = radius - rho;
                let bottom = t;
                let top = height - t;
                if side <= bottom && side <= top {
                    DistanceQuery {
                        distance: -side,
                        closest: base + a.as_ref() * t + rho_dir.as_ref() * *radius,
                        normal: rho_dir,
                    }
                } else if bottom <= top {
                    DistanceQuery {
                        distance: -bottom,
                        closest: base + radial,
                        normal: Unit::new_unchecked(-a.into_inner()),
                    }
                } else {
                    DistanceQuery {
                        distance: -top,
                        closest: base + a.as_ref() * *height + radial,
                        normal: a,
                    }
                }
            }
        }
    }
}

/// Collision between a spherical fingertip pad and a shape. Returns `None`
/// when the pad center is at least one pad radius away from the surface.
///
/// The intersection area uses the sphere-plane cap formula for all shapes
/// (local flatness assumption): A = pi * (2 r d - d^2) with d capped at r.
pub fn fingertip_contact(tip: &SpherePose, s: &Shape) -> Option<Contact> {
    let q = signed_distance(&tip.center, s);
    if q.distance >= tip.radius {
        return None;
    }
    let depth = tip.radius - q.distance;
    let d = depth.min(tip.radius);
    let area = PI * (2.0 * tip.radius * d - d * d);
    Some(Contact {
        point: q.closest,
        normal: q.normal,
        depth,
        area,
    })
}
