//! Stream and scene file formats, the deterministic replay engine, synthetic
//! stream generators, and report emission.

mod frames;
pub mod report;
mod scene;
pub mod synth;
mod replay;

pub use frames::{
    parse_force_frames, parse_hand_frames, serialize_hand_frames, ForceFrame, HandFrame,
};
pub use replay::{replay, ReplayError, ReplayReport, TickRecord};
pub use scene::{parse_scene, ActuatorConfig, Scene, SceneObject, Thresholds};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Scene(String),
}
