//! Grasp phase tracking: free hand, touching, a closed grasp, a completed
//! lift, or a failed (slipping) grasp. One transition per tick, so a grasp
//! always passes through Touching on its way up and Slipping is terminal —
//! a trial that slips has failed.

use super::VirtualFingerState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraspPhase {
    Free,
    Touching,
    Grasped,
    Lifted,
    Slipping,
}

impl std::fmt::Display for GraspPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraspPhase::Free => "Free",
            GraspPhase::Touching => "Touching",
            GraspPhase::Grasped => "Grasped",
            GraspPhase::Lifted => "Lifted",
            GraspPhase::Slipping => "Slipping",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspState {
    pub phase: GraspPhase,
    pub contact_count: u8,
    pub closure: bool,
    /// Accumulated time in Grasped or Lifted, seconds.
    pub hold_time: f64,
    /// Consecutive ticks with a virtual finger outside its friction cone.
    pub slip_ticks: u32,
}

impl Default for GraspState {
    fn default() -> Self {
        Self {
            phase: GraspPhase::Free,
            contact_count: 0,
            closure: false,
            hold_time: 0.0,
            slip_ticks: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspStateParams {
    /// Per-VF normal force needed for the grasp to count, N.
    pub force_threshold: f64,
    /// Object height gain that completes the lift, m.
    pub lift_height: f64,
    /// Virtual fingers that must press at the threshold (tripod: 3).
    pub required_contacts: u8,
    /// Consecutive over-cone ticks tolerated before the grasp slips.
    pub slip_tick_limit: u32,
}

impl Default for GraspStateParams {
    fn default() -> Self {
        Self {
            force_threshold: 0.5,
            lift_height: 0.02,
            required_contacts: 3,
            slip_tick_limit: 10,
        }
    }
}

/// Advance the grasp state machine by one tick.
///
/// `height_gain` is the object height above its starting pose; `closure`
/// is the force-closure verdict for this tick's contacts.
pub fn step_grasp_state(
    prev: &GraspState,
    vfs: &[VirtualFingerState; 3],
    closure: bool,
    height_gain: f64,
    dt: f64,
    params: &GraspStateParams,
) -> GraspState {
    let contact_count = vfs.iter().filter(|v| v.in_contact).count() as u8;
    let any_pressing = vfs
        .iter()
        .any(|v| v.in_contact && v.normal_magnitude > 0.0);
    let strong = vfs
        .iter()
        .filter(|v| v.in_contact && v.normal_magnitude >= params.force_threshold)
        .count() as u8;
    let slipping_now = vfs.iter().any(|v| v.in_contact && v.slipped);
    let slip_ticks = if slipping_now { prev.slip_ticks + 1 } else { 0 };
    let held = strong >= params.required_contacts && closure;

    let phase = if prev.phase == GraspPhase::Slipping {
        GraspPhase::Slipping
    } else if slip_ticks > params.slip_tick_limit {
        GraspPhase::Slipping
    } else {
        match prev.phase {
            GraspPhase::Free => {
                if any_pressing {
                    GraspPhase::Touching
                } else {
                    GraspPhase::Free
                }
            }
            GraspPhase::Touching => {
                if contact_count == 0 {
                    GraspPhase::Free
                } else if held {
                    GraspPhase::Grasped
                } else {
                    GraspPhase::Touching
                }
            }
            GraspPhase::Grasped => {
                if height_gain >= params.lift_height {
                    GraspPhase::Lifted
                } else if held {
                    GraspPhase::Grasped
                } else {
                    GraspPhase::Touching
                }
            }
            GraspPhase::Lifted => GraspPhase::Lifted,
            GraspPhase::Slipping => GraspPhase::Slipping,
        }
    };

    let hold_time = prev.hold_time
        + if matches!(phase, GraspPhase::Grasped | GraspPhase::Lifted) {
            dt
        } else {
            0.0
        };
    GraspState {
        phase,
        contact_count,
        closure,
        hold_time,
        slip_ticks,
    }
}
