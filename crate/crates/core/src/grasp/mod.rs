//! Virtual-finger aggregation, grasp map construction, object wrench,
//! force-closure test, grasp state machine, and the simple rigid-object
//! response that makes grasp/lift outcomes observable.

mod closure;
mod object;
mod state;

pub use closure::{closure_margin, force_closure, CLOSURE_MARGIN};
pub use object::{step_object, ObjectPose, RigidObjectState};
pub use state::{step_grasp_state, GraspPhase, GraspState, GraspStateParams};

use std::collections::BTreeSet;

use nalgebra::{Point3, Unit, Vector3};
use thiserror::Error;

use crate::geometry::Contact;
use crate::rendering::FingerForce;
use crate::taxonomy::VFAssignment;

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("no virtual finger is in contact; grasp map undefined")]
    NoGrasp,
    #[error("force closure needs 3 contacts, got {got}")]
    NeedThreeContacts { got: usize },
    #[error("cone_edges must be >= 4, got {0}")]
    BadConeEdges(usize),
    #[error("mu must be >= 0, got {0}")]
    BadMu(f64),
    #[error("dt must lie in (0, 0.01], got {0}")]
    BadDt(f64),
}

/// Rendered state of one real finger entering virtual-finger aggregation.
#[derive(Debug, Clone)]
pub struct FingerContactData {
    pub tip: Point3<f64>,
    pub force: FingerForce,
    pub contact: Option<Contact>,
    pub slipped: bool,
}

/// Aggregated state of one virtual finger.
#[derive(Debug, Clone)]
pub struct VirtualFingerState {
    pub vf_id: u8,
    pub member_fingers: BTreeSet<u8>,
    /// Centroid of member tips (contacting members only, when any contact).
    /// Undefined for empty member sets.
    pub position: Option<Point3<f64>>,
    /// Vector sum of member total forces.
    pub force: Vector3<f64>,
    pub in_contact: bool,
    /// Sum of member normal-force magnitudes.
    pub normal_magnitude: f64,
    /// Centroid of member contact points, when in contact.
    pub grasp_point: Option<Point3<f64>>,
    /// Mean outward contact normal, when in contact.
    pub contact_normal: Option<Unit<Vector3<f64>>>,
    /// True when any contacting member slid out of its friction cone.
    pub slipped: bool,
}

impl VirtualFingerState {
    fn empty(vf_id: u8, member_fingers: BTreeSet<u8>) -> Self {
        Self {
            vf_id,
            member_fingers,
            position: None,
            force: Vector3::zeros(),
            in_contact: false,
            normal_magnitude: 0.0,
            grasp_point: None,
            contact_normal: None,
            slipped: false,
        }
    }
}

/// Contact geometry of the grasp: `reference` is the object center of
/// mass, `normals[i]` the inward unit contact normal of virtual finger
/// i+1 (zero when not in contact), `arms[i]` the moment arm from the
/// reference to its grasp point.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspMap {
    pub reference: Point3<f64>,
    pub normals: [Vector3<f64>; 3],
    pub arms: [Vector3<f64>; 3],
}

/// Net force and moment applied to the object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl Wrench {
    pub fn zero() -> Self {
        Self {
            force: Vector3::zeros(),
            moment: Vector3::zeros(),
        }
    }
}

/// Combine per-finger forces into the three virtual fingers of `assignment`.
///
/// Fingers absent from `fingers` simply do not contribute. The VF position
/// is the centroid of contacting member tips, falling back to all member
/// tips when none contact.
pub fn aggregate_virtual_fingers(
    fingers: &[(u8, FingerContactData)],
    assignment: &VFAssignment,
) -> [VirtualFingerState; 3] {
    let sets = [&assignment.vf1, &assignment.vf2, &assignment.vf3];
    let mut out: Vec<VirtualFingerState> = Vec::with_capacity(3);
    for (idx, members) in sets.iter().enumerate() {
        let mut vf = VirtualFingerState::empty(idx as u8 + 1, (*members).clone());
        let data: Vec<&FingerContactData> = fingers
            .iter()
            .filter(|(id, _)| members.contains(id))
            .map(|(_, d)| d)
            .collect();
        if data.is_empty() {
            out.push(vf);
            continue;
        }
        let contacting: Vec<&&FingerContactData> =
            data.iter().filter(|d| d.contact.is_some()).collect();
        vf.in_contact = !contacting.is_empty();
        vf.slipped = data.iter().any(|d| d.slipped);
        for d in &data {
            vf.force += d.force.total;
            vf.normal_magnitude += d.force.normal_magnitude;
        }
        let tip_source: Vec<Point3<f64>> = if vf.in_contact {
            contacting.iter().map(|d| d.tip).collect()
        } else {
            data.iter().map(|d| d.tip).collect()
        };
        vf.position = Some(centroid(&tip_source));
        if vf.in_contact {
            let points: Vec<Point3<f64>> = contacting
                .iter()
                .map(|d| d.contact.as_ref().unwrap().point)
                .collect();
            vf.grasp_point = Some(centroid(&points));
            let normal_sum: Vector3<f64> = contacting
                .iter()
                .map(|d| d.contact.as_ref().unwrap().normal.into_inner())
                .sum();
            if normal_sum.norm() > 1e-12 {
                vf.contact_normal = Some(Unit::new_normalize(normal_sum));
            }
        }
        out.push(vf);
    }
    out.try_into().expect("exactly three virtual fingers")
}

fn centroid(points: &[Point3<f64>]) -> Point3<f64> {
    let sum = points
        .iter()
        .fold(Vector3::zeros(), |acc, p| acc + p.coords);
    Point3::from(sum / points.len() as f64)
}

/// Build the grasp map from the contacting virtual fingers: inward contact
/// normals and moment arms about the object center of mass. Non-contacting
/// virtual fingers contribute zero columns.
pub fn build_grasp_map(
    vfs: &[VirtualFingerState; 3],
    obj: &RigidObjectState,
) -> Result<GraspMap, GraspError> {
    if !vfs.iter().any(|v| v.in_contact) {
        return Err(GraspError::NoGrasp);
    }
    let reference = obj.pose.position;
    let mut normals = [Vector3::zeros(); 3];
    let mut arms = [Vector3::zeros(); 3];
    for (i, vf) in vfs.iter().enumerate() {
        if let (true, Some(point), Some(n_out)) = (vf.in_contact, vf.grasp_point, vf.contact_normal)
        {
            normals[i] = -n_out.into_inner();
            arms[i] = point - reference;
        }
    }
    Ok(GraspMap {
        reference,
        normals,
        arms,
    })
}

/// Net wrench on the object: the reaction of every rendered virtual-finger
/// force (friction already included in the totals) plus gravity. Moments
/// are taken about the grasp-map reference point.
///
/// Only this forward map (finger forces to object wrench) is provided;
/// distributing a desired wrench back onto the fingers is out of scope.
pub fn resultant_wrench(
    g: &GraspMap,
    vfs: &[VirtualFingerState; 3],
    gravity: &Vector3<f64>,
    obj: &RigidObjectState,
) -> Wrench {
    // Newton's third law: sum rendered forces first, negate once, so the
    // contact part is bit-identical to -(sum of rendered forces).
    let mut rendered_sum = Vector3::zeros();
    for vf in vfs.iter() {
        rendered_sum += vf.force;
    }
    let force = -rendered_sum + obj.mass * gravity;
    let mut moment = Vector3::zeros();
    for (i, vf) in vfs.iter().enumerate() {
        moment += g.arms[i].cross(&(-vf.force));
    }
    Wrench { force, moment }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::assign_virtual_fingers;
    use approx::assert_relative_eq;
    use nalgebra::UnitQuaternion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn finger(
        id: u8,
        tip: Point3<f64>,
        total: Vector3<f64>,
        contact: Option<Contact>,
    ) -> (u8, FingerContactData) {
        let normal_magnitude = contact
            .as_ref()
            .map(|c| total.dot(&c.normal).abs())
            .unwrap_or(0.0);
        (
            id,
            FingerContactData {
                tip,
                force: FingerForce {
                    spring: total,
                    friction: Vector3::zeros(),
                    total,
                    normal_magnitude,
                },
                contact,
                slipped: false,
            },
        )
    }

    fn contact_at(point: Point3<f64>, normal: Vector3<f64>) -> Contact {
        Contact {
            point,
            normal: Unit::new_normalize(normal),
            depth: 0.002,
            area: 1e-5,
        }
    }

    fn test_object(mass: f64) -> RigidObjectState {
        RigidObjectState {
            shape: crate::geometry::Shape::Sphere {
                center: Point3::origin(),
                radius: 0.03,
            },
            mass,
            pose: ObjectPose {
                position: Point3::origin(),
                orientation: UnitQuaternion::identity(),
            },
            velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
            mu: 0.5,
            k_spring: 1000.0,
        }
    }

    #[test]
    fn vf3_sums_member_forces_along_shared_normal() {
        let assignment = assign_virtual_fingers(&[1, 2, 3, 4, 5].into()).unwrap();
        let n = Vector3::z();
        let c = contact_at(Point3::origin(), n);
        let fingers = vec![
            finger(3, Point3::new(0.0, 0.0, 0.01), n * 2.0, Some(c)),
            finger(4, Point3::new(0.01, 0.0, 0.01), n * 1.0, Some(c)),
            finger(5, Point3::new(0.02, 0.0, 0.01), n * 0.5, Some(c)),
        ];
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        assert_relative_eq!(vfs[2].force, n * 3.5, epsilon = 1e-12);
        assert!(vfs[2].in_contact);
        // Thumb and index had no data at all.
        assert_eq!(vfs[0].force, Vector3::zeros());
        assert!(!vfs[0].in_contact);
    }

    #[test]
    fn empty_member_set_is_inactive() {
        let assignment = assign_virtual_fingers(&[1, 2].into()).unwrap();
        let fingers = vec![
            finger(
                1,
                Point3::origin(),
                Vector3::x(),
                Some(contact_at(Point3::origin(), Vector3::x())),
            ),
            finger(
                2,
                Point3::new(0.05, 0.0, 0.0),
                Vector3::y(),
                Some(contact_at(Point3::new(0.05, 0.0, 0.0), Vector3::y())),
            ),
        ];
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        assert_eq!(vfs[2].force, Vector3::zeros());
        assert!(!vfs[2].in_contact);
        assert!(vfs[2].position.is_none());
    }

    // Triangle inequality sweep over random member forces.
    #[test]
    fn vf_force_never_exceeds_member_sum() {
        let assignment = assign_virtual_fingers(&[1, 2, 3, 4, 5].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let fingers: Vec<(u8, FingerContactData)> = (1..=5)
                .map(|id| {
                    let f = Vector3::new(
                        rng.random_range(-5.0..5.0),
                        rng.random_range(-5.0..5.0),
                        rng.random_range(-5.0..5.0),
                    );
                    finger(
                        id,
                        Point3::new(0.01 * id as f64, 0.0, 0.0),
                        f,
                        Some(contact_at(Point3::origin(), Vector3::z())),
                    )
                })
                .collect();
            let vfs = aggregate_virtual_fingers(&fingers, &assignment);
            for vf in &vfs {
                let member_sum: f64 = fingers
                    .iter()
                    .filter(|(id, _)| vf.member_fingers.contains(id))
                    .map(|(_, d)| d.force.total.norm())
                    .sum();
                assert!(vf.force.norm() <= member_sum + 1e-12);
            }
        }
    }

    #[test]
    fn tripod_grasp_map_on_sphere() {
        let r = 0.03;
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let mut fingers = Vec::new();
        for (id, angle) in [(1u8, 0.0f64), (2, 2.0 * std::f64::consts::PI / 3.0), (3, 4.0 * std::f64::consts::PI / 3.0)] {
            let outward = Vector3::new(angle.cos(), angle.sin(), 0.0);
            let point = Point3::from(outward * r);
            fingers.push(finger(
                id,
                Point3::from(outward * (r - 0.004)),
                -outward * 5.0,
                Some(contact_at(point, outward)),
            ));
        }
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        let g = build_grasp_map(&vfs, &obj).unwrap();
        for i in 0..3 {
            assert_relative_eq!(g.arms[i].norm(), r, epsilon = 1e-12);
            // Inward normal is the negated outward radial direction.
            assert_relative_eq!(g.normals[i], -g.arms[i] / r, epsilon = 1e-12);
            assert_relative_eq!(g.normals[i].norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_contact_grasp_map() {
        let r = 0.03;
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1].into()).unwrap();
        let fingers = vec![finger(
            1,
            Point3::new(0.0, 0.0, r - 0.002),
            Vector3::new(0.0, 0.0, 3.0),
            Some(contact_at(Point3::new(0.0, 0.0, r), Vector3::z())),
        )];
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        let g = build_grasp_map(&vfs, &obj).unwrap();
        assert_relative_eq!(g.arms[0], Vector3::new(0.0, 0.0, r), epsilon = 1e-12);
        assert_relative_eq!(g.normals[0], Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-12);
        assert_eq!(g.normals[1], Vector3::zeros());
    }

    #[test]
    fn no_contact_grasp_map_is_error() {
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let fingers = vec![finger(1, Point3::origin(), Vector3::zeros(), None)];
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        assert!(matches!(
            build_grasp_map(&vfs, &obj),
            Err(GraspError::NoGrasp)
        ));
    }

    #[test]
    fn symmetric_tripod_wrench_cancels() {
        let r = 0.03;
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let mut fingers = Vec::new();
        for (id, angle) in [(1u8, 0.0f64), (2, 2.0 * std::f64::consts::PI / 3.0), (3, 4.0 * std::f64::consts::PI / 3.0)] {
            let outward = Vector3::new(angle.cos(), angle.sin(), 0.0);
            fingers.push(finger(
                id,
                Point3::from(outward * (r - 0.005)),
                -outward * 5.0,
                Some(contact_at(Point3::from(outward * r), outward)),
            ));
        }
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        let g = build_grasp_map(&vfs, &obj).unwrap();
        let w = resultant_wrench(&g, &vfs, &Vector3::zeros(), &obj);
        assert!(w.force.norm() < 1e-12);
        assert!(w.moment.norm() < 1e-12);
    }

    #[test]
    fn single_downward_force_moment() {
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1].into()).unwrap();
        // Rendered force on the finger is 3 N downward; the object feels the
        // upward reaction at arm (0.05, 0, 0).
        let fingers = vec![finger(
            1,
            Point3::new(0.05, 0.0, 0.0),
            Vector3::new(0.0, 0.0, -3.0),
            Some(contact_at(Point3::new(0.05, 0.0, 0.0), Vector3::z())),
        )];
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        let g = build_grasp_map(&vfs, &obj).unwrap();
        let w = resultant_wrench(&g, &vfs, &Vector3::zeros(), &obj);
        assert_relative_eq!(w.force, Vector3::new(0.0, 0.0, 3.0), epsilon = 1e-12);
        assert_relative_eq!(w.moment, Vector3::new(0.0, -0.15, 0.0), epsilon = 1e-12);
    }

    // Brute-force oracle: with singleton virtual fingers the wrench equals
    // direct per-finger summation.
    #[test]
    fn wrench_matches_per_finger_summation() {
        let obj = test_object(0.1);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let mut fingers = Vec::new();
            for id in 1..=3u8 {
                let dir = Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize();
                let point = Point3::from(dir * 0.03);
                let f = Vector3::new(
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-4.0..4.0),
                );
                fingers.push(finger(id, point, f, Some(contact_at(point, dir))));
            }
            let vfs = aggregate_virtual_fingers(&fingers, &assignment);
            let g = build_grasp_map(&vfs, &obj).unwrap();
            let w = resultant_wrench(&g, &vfs, &Vector3::zeros(), &obj);

            let mut brute_force = Vector3::zeros();
            let mut brute_moment = Vector3::zeros();
            for (_, d) in &fingers {
                let reacted = -d.force.total;
                brute_force += reacted;
                brute_moment += (d.contact.as_ref().unwrap().point - obj.pose.position).cross(&reacted);
            }
            assert!((w.force - brute_force).norm() < 1e-9);
            assert!((w.moment - brute_moment).norm() < 1e-9);
        }
    }

    #[test]
    fn newtons_third_law_exact_without_gravity() {
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let mut fingers = Vec::new();
        for id in 1..=3u8 {
            let f = Vector3::new(0.1 * id as f64, -0.2, 1.3 + id as f64);
            let point = Point3::new(0.01 * id as f64, 0.0, 0.02);
            fingers.push(finger(id, point, f, Some(contact_at(point, Vector3::z()))));
        }
        let vfs = aggregate_virtual_fingers(&fingers, &assignment);
        let g = build_grasp_map(&vfs, &obj).unwrap();
        let w = resultant_wrench(&g, &vfs, &Vector3::zeros(), &obj);
        let mut rendered = Vector3::zeros();
        for vf in &vfs {
            rendered += vf.force;
        }
        // Bit-identical: same summation order, one negation.
        assert_eq!(w.force, -rendered);
    }

    // Wrench linearity: additive and homogeneous in the virtual-finger
    // forces.
    #[test]
    fn wrench_linearity() {
        let obj = test_object(0.058);
        let assignment = assign_virtual_fingers(&[1, 2, 3].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let mk = |forces: &[Vector3<f64>; 3]| {
                let fingers: Vec<(u8, FingerContactData)> = (0..3)
                    .map(|i| {
                        let point = Point3::new(0.02 * (i as f64 + 1.0), 0.01, 0.0);
                        finger(i as u8 + 1, point, forces[i], Some(contact_at(point, Vector3::z())))
                    })
                    .collect();
                let vfs = aggregate_virtual_fingers(&fingers, &assignment);
                let g = build_grasp_map(&vfs, &obj).unwrap();
                resultant_wrench(&g, &vfs, &Vector3::zeros(), &obj)
            };
            let rand_f = |rng: &mut ChaCha8Rng| {
                Vector3::new(
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                )
            };
            let a = [rand_f(&mut rng), rand_f(&mut rng), rand_f(&mut rng)];
            let b = [rand_f(&mut rng), rand_f(&mut rng), rand_f(&mut rng)];
            let s: f64 = rng.random_range(0.1..3.0);
            let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
            let scaled = [a[0] * s, a[1] * s, a[2] * s];

            let wa = mk(&a);
            let wb = mk(&b);
            let wsum = mk(&sum);
            let wscaled = mk(&scaled);
            assert!((wsum.force - (wa.force + wb.force)).norm() <= 1e-12 * (1.0 + wsum.force.norm()));
            assert!(
                (wsum.moment - (wa.moment + wb.moment)).norm()
                    <= 1e-12 * (1.0 + wsum.moment.norm())
            );
            assert!((wscaled.force - wa.force * s).norm() <= 1e-12 * (1.0 + wscaled.force.norm()));
            assert!(
                (wscaled.moment - wa.moment * s).norm() <= 1e-12 * (1.0 + wscaled.moment.norm())
            );
        }
    }
}
