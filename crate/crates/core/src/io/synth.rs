//! Synthetic hand-frame generators. Three presets cover the engine's test
//! surface: a steady three-finger press, a grasp-and-lift trial, and
//! contact-free motion whose rotation statistics follow the
//! characterization study's yaw/pitch/roll distributions. All output is a
//! deterministic function of the seed.

use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scene::parse_scene;
use super::{HandFrame, Scene};
use crate::geometry::Orientation;

const FRAME_RATE: f64 = 100.0;
const DEG: f64 = std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    TripodPress,
    GraspLift,
    FreeMotion,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "tripod-press" => Some(Self::TripodPress),
            "grasp-lift" => Some(Self::GraspLift),
            "free-motion" => Some(Self::FreeMotion),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TripodPress => "tripod-press",
            Self::GraspLift => "grasp-lift",
            Self::FreeMotion => "free-motion",
        }
    }

    pub fn all() -> [Self; 3] {
        [Self::TripodPress, Self::GraspLift, Self::FreeMotion]
    }

    /// The matching scene document.
    pub fn scene_toml(&self) -> &'static str {
        match self {
            Self::TripodPress => TRIPOD_PRESS_SCENE,
            Self::GraspLift => GRASP_LIFT_SCENE,
            Self::FreeMotion => FREE_MOTION_SCENE,
        }
    }

    fn default_frames(&self) -> usize {
        match self {
            Self::TripodPress => 1001, // 10 s at 100 Hz
            Self::GraspLift => 601,    // 6 s
            Self::FreeMotion => 1001,
        }
    }
}

const TRIPOD_PRESS_SCENE: &str = r#"# tripod-press: fixed ball pressed by the three virtual fingers
gravity = [0.0, 0.0, -9.81]

[[objects]]
name = "press-ball"
kind = "sphere"
radius = 0.03
mass = 0.2
k_spring = 1000.0
mu = 0.5
position = [0.0, 0.0, 0.0]
fixed = true
"#;

const GRASP_LIFT_SCENE: &str = r#"# grasp-lift: tennis ball resting on a floor, grasped and lifted
gravity = [0.0, 0.0, -9.81]

[[objects]]
name = "tennis-ball"
kind = "sphere"
radius = 0.0335
mass = 0.058
k_spring = 1000.0
mu = 0.5
position = [0.0, 0.0, 0.0335]

[[objects]]
name = "floor"
kind = "halfspace"
position = [0.0, 0.0, 0.0]
"#;

const FREE_MOTION_SCENE: &str = r#"# free-motion: the hand never reaches the object
gravity = [0.0, 0.0, -9.81]

[[objects]]
name = "idle-ball"
kind = "sphere"
radius = 0.03
mass = 0.2
k_spring = 1000.0
mu = 0.5
position = [0.0, 0.0, 0.0]
fixed = true
"#;

/// Steady-state press depths per virtual finger, meters. At the default
/// 1000 N/m stiffness these render 7.0, 3.5, and 3.7 N.
pub const PRESS_DEPTHS: [f64; 3] = [0.0070, 0.0035, 0.0037];

/// Generate a preset stream and its matching scene. `n_frames` overrides
/// the preset's default length (frames are spaced at 100 Hz).
pub fn generate(preset: Preset, seed: u64, n_frames: Option<usize>) -> (Scene, Vec<HandFrame>) {
    let scene = parse_scene(preset.scene_toml()).expect("embedded preset scene parses");
    let n = n_frames.unwrap_or_else(|| preset.default_frames()).max(2);
    let frames = match preset {
        Preset::TripodPress => tripod_press(seed, n),
        Preset::GraspLift => grasp_lift(seed, n),
        Preset::FreeMotion => free_motion(seed, n),
    };
    (scene, frames)
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

/// Ramp from 0 at t0 to 1 at t1.
fn ramp(t: f64, t0: f64, t1: f64) -> f64 {
    smoothstep((t - t0) / (t1 - t0))
}

fn contact_azimuths() -> [Vector3<f64>; 3] {
    std::array::from_fn(|k| {
        let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
        Vector3::new(a.cos(), a.sin(), 0.0)
    })
}

/// Tips for the three virtual fingers pressed radially into a sphere at
/// `center`: the VF3 target is realized by middle/ring/little tips whose
/// centroid sits exactly on it.
fn tips_for_depths(
    center: &Point3<f64>,
    radius: f64,
    penetration: [f64; 3],
) -> [Point3<f64>; 5] {
    let dirs = contact_azimuths();
    let vf_points: [Point3<f64>; 3] =
        std::array::from_fn(|k| center + dirs[k] * (radius - penetration[k]));
    let spread = Vector3::z() * 0.005;
    [
        vf_points[0],
        vf_points[1],
        vf_points[2] + spread,
        vf_points[2] - spread,
        vf_points[2],
    ]
}

fn hand_pose_around(
    center: &Point3<f64>,
    wander: Vector3<f64>,
) -> (Point3<f64>, Point3<f64>, Orientation) {
    let palm = center + Vector3::new(0.0, 0.0, 0.09) + wander;
    let wrist = palm + Vector3::new(0.0, -0.07, 0.02);
    // Hand pitched down toward the object.
    let orientation = Orientation::from_euler(0.0, -70.0 * DEG, 0.0);
    (palm, wrist, orientation)
}

fn tripod_press(seed: u64, n: usize) -> Vec<HandFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let center = Point3::origin();
    let radius = 0.03;
    let gap = 0.02;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / FRAME_RATE;
        // Approach between 0.5 s and 2.0 s, then hold at depth.
        let travel = ramp(t, 0.5, 2.0);
        let penetration: [f64; 3] =
            std::array::from_fn(|k| -gap + (gap + PRESS_DEPTHS[k]) * travel);
        let tips = tips_for_depths(&center, radius, penetration);
        // Seeded sub-millimeter wander on the palm only; the tips stay exact
        // so steady-state forces match the commanded depths.
        let wander = Vector3::new(
            5e-4 * (0.8 * t + phase).sin(),
            5e-4 * (0.6 * t + 1.3 * phase).cos(),
            0.0,
        );
        let (palm, wrist, orientation) = hand_pose_around(&center, wander);
        frames.push(HandFrame {
            timestamp: t,
            tips,
            palm,
            wrist,
            orientation,
            finger_bases: None,
            grabbing: t >= 2.0,
        });
    }
    frames
}

fn grasp_lift(seed: u64, n: usize) -> Vec<HandFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let radius = 0.0335;
    let rest_center = Point3::new(0.0, 0.0, radius);
    let depth = 0.004;
    let gap = 0.02;
    let lift = 0.05;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / FRAME_RATE;
        let travel = ramp(t, 0.2, 1.2);
        let rise = lift * ramp(t, 2.0, 4.0);
        let penetration = [-gap + (gap + depth) * travel; 3];
        let carried = rest_center + Vector3::z() * rise;
        let tips = tips_for_depths(&carried, radius, penetration);
        let wander = Vector3::new(3e-4 * (0.7 * t + phase).sin(), 0.0, 0.0);
        let (palm, wrist, orientation) = hand_pose_around(&carried, wander);
        frames.push(HandFrame {
            timestamp: t,
            tips,
            palm,
            wrist,
            orientation,
            finger_bases: None,
            grabbing: t >= 1.2,
        });
    }
    frames
}

fn free_motion(seed: u64, n: usize) -> Vec<HandFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Rotation marginals follow the characterization study: yaw
    // N(-11.57, 6.7) deg, pitch N(20.04, 13.09) deg, roll N(-53.68, 32.29)
    // deg. Pitch is clamped away from the gimbal singularity.
    let yaw_dist = Normal::new(-11.57 * DEG, 6.7 * DEG).unwrap();
    let pitch_dist = Normal::new(20.04 * DEG, 13.09 * DEG).unwrap();
    let roll_dist = Normal::new(-53.68 * DEG, 32.29 * DEG).unwrap();
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);

    // Tip fan in the hand frame (meters): thumb out to the side, fingers
    // forward, loosely matching adult finger lengths.
    let local_tips = [
        Vector3::new(0.03, -0.045, -0.01),
        Vector3::new(0.075, -0.015, 0.0),
        Vector3::new(0.08, 0.0, 0.0),
        Vector3::new(0.075, 0.015, 0.0),
        Vector3::new(0.06, 0.03, 0.0),
    ];

    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / FRAME_RATE;
        let palm = Point3::new(
            0.05 * (0.31 * t + phase).sin(),
            0.12 + 0.05 * (0.23 * t + 0.7 * phase).sin(),
            0.25 + 0.03 * (0.17 * t + 1.9 * phase).sin(),
        );
        let yaw = yaw_dist.sample(&mut rng);
        let pitch = pitch_dist.sample(&mut rng).clamp(-80.0 * DEG, 80.0 * DEG);
        let roll = roll_dist.sample(&mut rng);
        let orientation = Orientation::from_euler(yaw, pitch, roll);
        let r = orientation.rotation();
        let tips = std::array::from_fn(|k| palm + r * local_tips[k]);
        let wrist = palm - r * Vector3::new(0.07, 0.0, 0.0);
        frames.push(HandFrame {
            timestamp: t,
            tips,
            palm,
            wrist,
            orientation,
            finger_bases: None,
            grabbing: false,
        });
    }
    frames
}
