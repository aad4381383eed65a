//! Three-finger (tripod) haptic grasp toolkit.
//!
//! The crate maps five tracked fingers onto three virtual fingers, renders
//! per-finger contact forces against primitive objects via god-object
//! proxies, aggregates them into object wrenches with force-closure and
//! grasp-state logic, and computes grasp characterization metrics from
//! hand-tracking streams. A deterministic 1 kHz replay engine binds the
//! pieces together; `trigrasp-cli` exposes it on the command line.

pub mod device;
pub mod geometry;
pub mod grasp;
pub mod io;
pub mod metrics;
pub mod rendering;
pub mod taxonomy;

pub use geometry::{Contact, Orientation, Shape, SpherePose};
pub use rendering::{FingerForce, ProxyState, RenderParams};
