//! The deterministic replay engine: resamples a hand-frame stream to the
//! actuator tick rate and runs the full per-tick pipeline — virtual-finger
//! assignment, proxy updates, spring and friction forces, actuator
//! channels, object wrench, grasp state, object step. Identical inputs
//! produce bit-identical reports.

use nalgebra::{Point3, Rotation3, UnitQuaternion, Vector3};
use thiserror::Error;

use super::{HandFrame, Scene};
use crate::device::{ActuatorChannel, Channel, SimClock};
use crate::geometry::Shape;
use crate::grasp::{
    aggregate_virtual_fingers, build_grasp_map, force_closure, resultant_wrench, step_grasp_state,
    step_object, FingerContactData, GraspPhase, GraspState, GraspStateParams, RigidObjectState,
    Wrench,
};
use crate::metrics::{analyze_stream, MetricsError, StreamAnalysis};
use crate::rendering::{
    friction_force, perception_rate, spring_force, update_proxy, ProxyState, RenderError,
    RenderParams,
};
use crate::taxonomy::{assign_virtual_fingers, VFAssignment};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("replay needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("tick {tick} (virtual finger {vf}): {source}")]
    Tunneling {
        tick: u64,
        vf: u8,
        source: RenderError,
    },
    #[error("scene not replayable: {0}")]
    Scene(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// One line of the per-tick log.
#[derive(Debug, Clone)]
pub struct TickRecord {
    pub tick: u64,
    pub time: f64,
    pub phase: GraspPhase,
    pub vf_force: [Vector3<f64>; 3],
    pub vf_magnitude: [f64; 3],
    pub actuator: [f64; 3],
    pub perception: [f64; 3],
    pub object_position: Point3<f64>,
    pub contact_count: u8,
    pub closure: bool,
}

/// Full replay output: the per-tick log, the final grasp state, and the
/// metric analysis of the input stream.
#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub tick_rate: u32,
    pub ticks: Vec<TickRecord>,
    pub final_state: GraspState,
    pub analysis: StreamAnalysis,
    pub warnings: Vec<String>,
}

impl ReplayReport {
    pub fn outcome(&self) -> GraspPhase {
        self.final_state.phase
    }

    /// Peak rendered force magnitude per virtual finger.
    pub fn max_vf_force(&self) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for t in &self.ticks {
            for k in 0..3 {
                out[k] = out[k].max(t.vf_magnitude[k]);
            }
        }
        out
    }
}

/// Run the replay. `rate_override` replaces the scene's tick rate.
pub fn replay(
    scene: &Scene,
    frames: &[HandFrame],
    rate_override: Option<u32>,
) -> Result<ReplayReport, ReplayError> {
    if frames.len() < 2 {
        return Err(ReplayError::TooFewFrames(frames.len()));
    }
    let rate = rate_override.unwrap_or(scene.actuator.tick_rate);
    if rate == 0 {
        return Err(ReplayError::Scene("tick rate must be > 0".into()));
    }
    let target = scene
        .objects
        .first()
        .ok_or_else(|| ReplayError::Scene("scene has no objects".into()))?;
    if matches!(target.shape, Shape::HalfSpace { .. }) {
        return Err(ReplayError::Scene(
            "the first object is the render target and cannot be a half-space".into(),
        ));
    }

    let assignment: VFAssignment =
        assign_virtual_fingers(&[1, 2, 3, 4, 5].into()).expect("full hand assigns");
    let vf_radii = [
        scene.fingertip_radii[0],
        scene.fingertip_radii[1],
        (scene.fingertip_radii[2] + scene.fingertip_radii[3] + scene.fingertip_radii[4]) / 3.0,
    ];
    let render_params: [RenderParams; 3] = std::array::from_fn(|k| RenderParams {
        k_spring: target.k_spring,
        mu: target.mu,
        k_material: target.k_material,
        epsilon_contact: 1e-6,
        pad_radius: vf_radii[k],
    });

    let mut channels = [
        ActuatorChannel::new(Channel::Thumb, scene.actuator.peaks[0], scene.actuator.slew)
            .map_err(|e| ReplayError::Scene(e.to_string()))?,
        ActuatorChannel::new(Channel::Index, scene.actuator.peaks[1], scene.actuator.slew)
            .map_err(|e| ReplayError::Scene(e.to_string()))?,
        ActuatorChannel::new(
            Channel::Middle,
            scene.actuator.peaks[2],
            scene.actuator.slew,
        )
        .map_err(|e| ReplayError::Scene(e.to_string()))?,
    ];

    let supports: Vec<Shape> = scene
        .objects
        .iter()
        .skip(1)
        .filter(|o| o.fixed && matches!(o.shape, Shape::HalfSpace { .. }))
        .map(|o| o.to_state().world_shape())
        .collect();

    let up = if scene.gravity.norm() > 1e-12 {
        -scene.gravity.normalize()
    } else {
        Vector3::z()
    };

    let ticks_frames = resample(frames, rate);
    let mut clock = SimClock::new(rate).map_err(|e| ReplayError::Scene(e.to_string()))?;
    let dt = clock.dt();

    let mut object = target.to_state();
    let base_height = up.dot(&object.pose.position.coords);
    let mut proxies: [ProxyState; 3] = std::array::from_fn(|k| {
        ProxyState::free(vf_hips(&ticks_frames[0])[k])
    });
    let mut state = GraspState::default();
    let state_params = GraspStateParams {
        force_threshold: scene.thresholds.force_threshold,
        lift_height: scene.thresholds.lift_height,
        ..GraspStateParams::default()
    };
    let mut attach_offset: Option<Vector3<f64>> = None;
    let mut ticks = Vec::with_capacity(ticks_frames.len());

    for frame in &ticks_frames {
        let hips = vf_hips(frame);
        let world_shape = object.world_shape();

        let mut forces = [crate::rendering::FingerForce::zero(); 3];
        let mut perception = [0.0f64; 3];
        for k in 0..3 {
            let next = update_proxy(&proxies[k], hips[k], &world_shape, &render_params[k])
                .map_err(|e| match e {
                    RenderError::Tunneling { .. } => ReplayError::Tunneling {
                        tick: clock.tick_index,
                        vf: k as u8 + 1,
                        source: e,
                    },
                    other => ReplayError::Scene(other.to_string()),
                })?;
            let sf = spring_force(&next, &render_params[k]);
            let ff = friction_force(&next, sf.spring, &render_params[k]);
            perception[k] = perception_rate(&render_params[k], &next, &ff).unwrap_or(0.0);
            forces[k] = ff;
            proxies[k] = next;
        }

        let actuator = [
            channels[0].command_force(forces[0].total.norm(), dt),
            channels[1].command_force(forces[1].total.norm(), dt),
            channels[2].command_force(forces[2].total.norm(), dt),
        ];

        // One representative real finger per virtual finger (thumb, index,
        // middle); the middle entry carries the aggregated VF3 tip.
        let finger_data: Vec<(u8, FingerContactData)> = (0..3)
            .map(|k| {
                (
                    k as u8 + 1,
                    FingerContactData {
                        tip: hips[k],
                        force: forces[k],
                        contact: proxies[k].contact,
                        slipped: proxies[k].slipped,
                    },
                )
            })
            .collect();
        let vfs = aggregate_virtual_fingers(&finger_data, &assignment);

        let contact_count = vfs.iter().filter(|v| v.in_contact).count();
        let (wrench, closure) = if contact_count > 0 {
            let map = build_grasp_map(&vfs, &object).expect("contacts present");
            let closure = if contact_count == 3 {
                force_closure(&map, target.mu, 8).unwrap_or(false)
            } else {
                false
            };
            (
                resultant_wrench(&map, &vfs, &scene.gravity, &object),
                closure,
            )
        } else {
            (
                Wrench {
                    force: object.mass * scene.gravity,
                    moment: Vector3::zeros(),
                },
                false,
            )
        };

        let height_gain = up.dot(&object.pose.position.coords) - base_height;
        state = step_grasp_state(&state, &vfs, closure, height_gain, dt, &state_params);

        if !target.fixed {
            let pose_before = object.pose;
            if matches!(state.phase, GraspPhase::Grasped | GraspPhase::Lifted) {
                // Kinematic attachment to the virtual-finger centroid.
                let centroid = Point3::from(
                    (hips[0].coords + hips[1].coords + hips[2].coords) / 3.0,
                );
                let offset = *attach_offset
                    .get_or_insert(object.pose.position - centroid);
                let new_pos = centroid + offset;
                object.velocity = (new_pos - object.pose.position) / dt;
                object.pose.position = new_pos;
            } else {
                attach_offset = None;
                object = step_object(&object, &wrench, dt)
                    .map_err(|e| ReplayError::Scene(e.to_string()))?;
                for plane in &supports {
                    rest_on_support(&mut object, plane);
                }
            }
            // A stuck proxy is attached to the object's material point, so
            // it must ride along with the object's motion.
            carry_proxies(&mut proxies, &pose_before, &object.pose);
        }

        ticks.push(TickRecord {
            tick: clock.tick_index,
            time: clock.time(),
            phase: state.phase,
            vf_force: [forces[0].total, forces[1].total, forces[2].total],
            vf_magnitude: [
                forces[0].total.norm(),
                forces[1].total.norm(),
                forces[2].total.norm(),
            ],
            actuator,
            perception,
            object_position: object.pose.position,
            contact_count: contact_count as u8,
            closure,
        });
        clock = clock.advance();
    }

    let analysis = analyze_stream(frames, false)?;
    Ok(ReplayReport {
        tick_rate: rate,
        ticks,
        final_state: state,
        analysis,
        warnings: Vec::new(),
    })
}

/// Apply the object's rigid motion over one tick to every contacting
/// proxy, keeping each stuck to its material point.
fn carry_proxies(
    proxies: &mut [ProxyState; 3],
    before: &crate::grasp::ObjectPose,
    after: &crate::grasp::ObjectPose,
) {
    let delta_rot = after.orientation * before.orientation.inverse();
    for p in proxies.iter_mut() {
        if p.in_contact {
            let local = p.proxy - before.position;
            p.proxy = after.position + delta_rot.transform_vector(&local);
        }
    }
}

/// Virtual-finger haptic interaction points: thumb tip, index tip, and the
/// centroid of the middle/ring/little tips.
fn vf_hips(f: &HandFrame) -> [Point3<f64>; 3] {
    [
        f.tips[0],
        f.tips[1],
        Point3::from((f.tips[2].coords + f.tips[3].coords + f.tips[4].coords) / 3.0),
    ]
}

/// Keep a movable object from sinking through a fixed half-space: project
/// it out along the plane normal and cancel inward normal velocity.
fn rest_on_support(obj: &mut RigidObjectState, plane: &Shape) {
    let Shape::HalfSpace { point, normal } = plane else {
        return;
    };
    let pen = support_clearance(&obj.world_shape(), point, normal);
    if pen < 0.0 {
        obj.pose.position -= normal * pen;
        let vn = obj.velocity.dot(normal);
        if vn < 0.0 {
            obj.velocity -= normal * vn;
        }
    }
}

/// Lowest signed distance of any point of `shape` above the plane.
fn support_clearance(shape: &Shape, plane_point: &Point3<f64>, n: &Vector3<f64>) -> f64 {
    match shape {
        Shape::Sphere { center, radius } => (center - plane_point).dot(n) - radius,
        Shape::Box {
            center,
            half_extents,
            orientation,
        } => {
            let mut reach = 0.0;
            for axis in 0..3 {
                let mut e = Vector3::zeros();
                e[axis] = half_extents[axis];
                reach += orientation.transform_vector(&e).dot(n).abs();
            }
            (center - plane_point).dot(n) - reach
        }
        Shape::Cylinder {
            base,
            axis,
            radius,
            height,
        } => {
            let radial = (n - axis * n.dot(axis)).norm();
            let cap0 = (base - plane_point).dot(n) - radius * radial;
            let top = base + axis * *height;
            let cap1 = (top - plane_point).dot(n) - radius * radial;
            cap0.min(cap1)
        }
        Shape::HalfSpace { .. } => f64::INFINITY,
    }
}

/// Resample a frame stream to the tick rate: linear interpolation on
/// positions, shortest-arc spherical interpolation on orientations, the
/// grabbing flag carried forward from the earlier keyframe. The first and
/// last frames appear exactly in the output.
pub fn resample(frames: &[HandFrame], rate: u32) -> Vec<HandFrame> {
    let t0 = frames[0].timestamp;
    let t1 = frames[frames.len() - 1].timestamp;
    let n_ticks = ((t1 - t0) * rate as f64).ceil() as usize + 1;
    let mut out = Vec::with_capacity(n_ticks);
    let mut seg = 0usize;
    for i in 0..n_ticks {
        let t = t0 + i as f64 / rate as f64;
        if i == 0 {
            out.push(frames[0].clone());
            continue;
        }
        if t >= t1 {
            let mut last = frames[frames.len() - 1].clone();
            last.timestamp = t.min(t1);
            out.push(last);
            continue;
        }
        while frames[seg + 1].timestamp < t {
            seg += 1;
        }
        out.push(interpolate(&frames[seg], &frames[seg + 1], t));
    }
    out
}

fn interpolate(a: &HandFrame, b: &HandFrame, t: f64) -> HandFrame {
    let u = (t - a.timestamp) / (b.timestamp - a.timestamp);
    let lerp = |pa: &Point3<f64>, pb: &Point3<f64>| Point3::from(pa.coords.lerp(&pb.coords, u));
    let qa = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
        a.orientation.rotation(),
    ));
    let mut qb = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
        b.orientation.rotation(),
    ));
    // Shortest arc: flip the sign on antipodal representations.
    if qa.coords.dot(&qb.coords) < 0.0 {
        qb = UnitQuaternion::new_unchecked(-qb.into_inner());
    }
    let q = qa.slerp(&qb, u);
    HandFrame {
        timestamp: t,
        tips: std::array::from_fn(|k| lerp(&a.tips[k], &b.tips[k])),
        palm: lerp(&a.palm, &b.palm),
        wrist: lerp(&a.wrist, &b.wrist),
        orientation: crate::geometry::Orientation {
            direction: q * Vector3::x(),
            palm_normal: q * (-Vector3::z()),
        },
        finger_bases: match (&a.finger_bases, &b.finger_bases) {
            (Some(ba), Some(bb)) => Some(std::array::from_fn(|k| lerp(&ba[k], &bb[k]))),
            _ => None,
        },
        grabbing: a.grabbing,
    }
}
