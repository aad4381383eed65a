//! Per-virtual-finger god-object proxy maintenance and force laws.
//!
//! The haptic interactive point (HIP) is the tracked fingertip and may
//! penetrate the object; the proxy is constrained to free space or the
//! object surface. The rendered spring force pulls the HIP toward the
//! proxy. With friction, the proxy sticks to the surface until the
//! tangential spring demand leaves the Coulomb cone, then slides along the
//! surface until the demand sits exactly on the cone boundary.

use nalgebra::{Point3, Unit, Vector3};
use thiserror::Error;

use crate::geometry::{fingertip_contact, signed_distance, Contact, Shape, SpherePose};

/// Per-tick HIP motion beyond this aborts the update: the quasi-static
/// proxy would tunnel through thin geometry.
pub const MAX_HIP_STEP: f64 = 0.05;

/// Slack used for cone containment and slip detection, in newtons.
const CONE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid shape for proxy update: {0}")]
    InvalidShape(#[from] crate::geometry::GeometryError),
    #[error("per-tick HIP motion {step:.4} m exceeds {max:.3} m; refusing to tunnel")]
    Tunneling { step: f64, max: f64 },
    #[error("perception rate undefined: contact area is zero")]
    UndefinedPerception,
    #[error("perception rate undefined: not in contact")]
    NotInContact,
}

/// Force-law parameters for one rendered finger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderParams {
    /// Contact spring stiffness, N/m.
    pub k_spring: f64,
    /// Coulomb friction coefficient.
    pub mu: f64,
    /// Material constant of the perception-rate law.
    pub k_material: f64,
    /// Proxy surface offset tolerance, m.
    pub epsilon_contact: f64,
    /// Fingertip pad radius used for the contact-area model, m.
    pub pad_radius: f64,
}

impl Default for RenderParams {
    fn default() -> Self {
        Self {
            k_spring: 1000.0,
            mu: 0.5,
            k_material: 1.0,
            epsilon_contact: 1e-6,
            pad_radius: 0.008,
        }
    }
}

impl RenderParams {
    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: String| {
            RenderError::InvalidShape(crate::geometry::GeometryError::InvalidShape(m))
        };
        if self.k_spring <= 0.0 {
            return Err(bad(format!("k_spring must be > 0, got {}", self.k_spring)));
        }
        if self.mu < 0.0 {
            return Err(bad(format!("mu must be >= 0, got {}", self.mu)));
        }
        if self.k_material <= 0.0 {
            return Err(bad(format!("k_material must be > 0, got {}", self.k_material)));
        }
        if !(0.0..=1e-4).contains(&self.epsilon_contact) {
            return Err(bad(format!(
                "epsilon_contact must lie in [0, 1e-4], got {}",
                self.epsilon_contact
            )));
        }
        if self.pad_radius <= 0.0 {
            return Err(bad(format!("pad_radius must be > 0, got {}", self.pad_radius)));
        }
        Ok(())
    }
}

/// God-object proxy paired with its HIP.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyState {
    pub hip: Point3<f64>,
    pub proxy: Point3<f64>,
    pub in_contact: bool,
    pub contact: Option<Contact>,
    /// hip - proxy.
    pub displacement: Vector3<f64>,
    /// HIP motion over the last update.
    pub last_hip_delta: Vector3<f64>,
    /// True when the proxy slid this tick (tangential demand left the cone).
    pub slipped: bool,
}

impl ProxyState {
    /// A proxy at rest in free space.
    pub fn free(hip: Point3<f64>) -> Self {
        Self {
            hip,
            proxy: hip,
            in_contact: false,
            contact: None,
            displacement: Vector3::zeros(),
            last_hip_delta: Vector3::zeros(),
            slipped: false,
        }
    }
}

/// Rendered contact force, resolved into the surface-normal spring part and
/// the tangential friction part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerForce {
    pub spring: Vector3<f64>,
    pub friction: Vector3<f64>,
    pub total: Vector3<f64>,
    pub normal_magnitude: f64,
}

impl FingerForce {
    pub fn zero() -> Self {
        Self {
            spring: Vector3::zeros(),
            friction: Vector3::zeros(),
            total: Vector3::zeros(),
            normal_magnitude: 0.0,
        }
    }
}

/// Advance the god-object proxy for one tick.
///
/// In free space the proxy tracks the HIP exactly. In contact the surface
/// acts as a virtual wall: with `mu = 0` the proxy is the closest surface
/// point to the HIP; with friction it sticks at its previous surface spot
/// until the tangential spring demand exceeds `mu` times the normal spring
/// force, then slides until the demand lies on the cone boundary.
pub fn update_proxy(
    prev: &ProxyState,
    new_hip: Point3<f64>,
    s: &Shape,
    p: &RenderParams,
) -> Result<ProxyState, RenderError> {
    s.validate()?;
    let hip_delta = new_hip - prev.hip;
    let step = hip_delta.norm();
    if step > MAX_HIP_STEP {
        return Err(RenderError::Tunneling {
            step,
            max: MAX_HIP_STEP,
        });
    }

    let q = signed_distance(&new_hip, s);
    if q.distance >= 0.0 {
        let mut next = ProxyState::free(new_hip);
        next.last_hip_delta = hip_delta;
        return Ok(next);
    }

    // Penetrating. The frictionless target is the closest surface point;
    // the stuck candidate is the previous proxy re-projected onto the
    // (possibly moved) surface, or first contact at the closest point.
    let surface_target = q.closest;
    let candidate = if prev.in_contact {
        signed_distance(&prev.proxy, s).closest
    } else {
        surface_target
    };
    let (t_demand, n_force) = tangential_demand(&new_hip, &candidate, s, p);
    let (proxy, slipped) = if p.mu == 0.0 {
        // Free sliding; any tangential demand at the stuck spot is a slip.
        (surface_target, t_demand > CONE_TOL)
    } else if t_demand <= p.mu * n_force + CONE_TOL {
        (candidate, false)
    } else {
        (
            slide_to_cone(&new_hip, &candidate, &surface_target, s, p),
            true,
        )
    };

    let contact = fingertip_contact(
        &SpherePose {
            center: new_hip,
            radius: p.pad_radius,
        },
        s,
    );
    Ok(ProxyState {
        hip: new_hip,
        proxy,
        in_contact: true,
        contact,
        displacement: new_hip - proxy,
        last_hip_delta: hip_delta,
        slipped,
    })
}

/// Tangential and normal spring-force magnitudes for a proxy candidate.
fn tangential_demand(
    hip: &Point3<f64>,
    candidate: &Point3<f64>,
    s: &Shape,
    p: &RenderParams,
) -> (f64, f64) {
    let n = surface_normal(candidate, s);
    let spring = p.k_spring * (candidate - hip);
    let normal_part = spring.dot(&n).max(0.0);
    let tangential = spring - n.as_ref() * spring.dot(&n);
    (tangential.norm(), normal_part)
}

fn surface_normal(at: &Point3<f64>, s: &Shape) -> Unit<Vector3<f64>> {
    signed_distance(at, s).normal
}

/// Slide the proxy along the surface from the stuck candidate toward the
/// closest-point target until the tangential demand equals mu times the
/// normal force. The demand strictly exceeds the cone at the start and is
/// zero at the target, so bisection on the chord (re-projected to the
/// surface) brackets the boundary.
fn slide_to_cone(
    hip: &Point3<f64>,
    stuck: &Point3<f64>,
    target: &Point3<f64>,
    s: &Shape,
    p: &RenderParams,
) -> Point3<f64> {
    let over_cone = |q: &Point3<f64>| {
        let (t, n) = tangential_demand(hip, q, s, p);
        t - p.mu * n
    };
    let chord = target - stuck;
    if chord.norm() < 1e-15 {
        return *target;
    }
    let at = |f: f64| signed_distance(&(stuck + chord * f), s).closest;
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if over_cone(&at(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

/// Spring force of the displaced proxy, `k * (proxy - hip)` — the full
/// (possibly oblique) spring pulling the HIP back to the proxy.
pub fn spring_force(ps: &ProxyState, p: &RenderParams) -> FingerForce {
    if !ps.in_contact {
        return FingerForce::zero();
    }
    let spring = p.k_spring * (ps.proxy - ps.hip);
    let normal_magnitude = ps
        .contact
        .as_ref()
        .map(|c| spring.dot(&c.normal).max(0.0))
        .unwrap_or(0.0);
    FingerForce {
        spring,
        friction: Vector3::zeros(),
        total: spring,
        normal_magnitude,
    }
}

/// Resolve a spring force into its normal part plus a friction force
/// clamped to the Coulomb cone.
pub fn friction_force(ps: &ProxyState, spring: Vector3<f64>, p: &RenderParams) -> FingerForce {
    let Some(contact) = ps.contact.as_ref() else {
        return FingerForce::zero();
    };
    let n = contact.normal;
    let normal_magnitude = spring.dot(&n).max(0.0);
    let normal_part = n.as_ref() * spring.dot(&n);
    let tangential = spring - normal_part;
    let cap = p.mu * normal_magnitude;
    let t_norm = tangential.norm();
    let friction = if t_norm <= cap || t_norm == 0.0 {
        tangential
    } else {
        tangential * (cap / t_norm)
    };
    FingerForce {
        spring: normal_part,
        friction,
        total: normal_part + friction,
        normal_magnitude,
    }
}

/// Perception-rate scalar: k * |dX| * |F| / A, the material constant times
/// HIP motion times force magnitude over contact area.
pub fn perception_rate(
    p: &RenderParams,
    ps: &ProxyState,
    f: &FingerForce,
) -> Result<f64, RenderError> {
    if !ps.in_contact {
        return Err(RenderError::NotInContact);
    }
    let area = ps.contact.as_ref().map(|c| c.area).unwrap_or(0.0);
    if area <= 0.0 {
        return Err(RenderError::UndefinedPerception);
    }
    Ok(p.k_material * ps.last_hip_delta.norm() * f.total.norm() / area)
}
