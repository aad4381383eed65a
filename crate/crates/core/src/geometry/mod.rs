//! Shape primitives, fingertip-object collision queries, sphere fitting,
//! and orientation decomposition. All quantities are SI (m, rad); mm and
//! degree values are converted at ingestion and report boundaries.

mod euler;
mod shape;
mod sphere_fit;

pub use euler::{euler_decompose, EulerAngles, Orientation};
pub use shape::{fingertip_contact, signed_distance, Contact, DistanceQuery, Shape, SpherePose};
pub use sphere_fit::fit_sphere;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("degenerate geometry: centered point matrix has rank {rank}, need 3")]
    DegenerateGeometry { rank: usize },
    #[error("sphere fit needs at least 4 points, got {got}")]
    InsufficientPoints { got: usize },
    #[error("degenerate orientation frame: direction and palm normal are parallel")]
    DegenerateFrame,
}
