//! Three-channel actuator simulation: force commands pass through
//! peak-force saturation and slew limiting on a fixed-rate clock.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("actuator {field} must be > 0, got {value}")]
    BadParameter { field: &'static str, value: f64 },
    #[error("tick rate must be > 0")]
    BadTickRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Thumb,
    Index,
    Middle,
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Channel::Thumb => "thumb",
            Channel::Index => "index",
            Channel::Middle => "middle",
        })
    }
}

/// One slider/belt actuator channel. `peak_force` caps the output
/// magnitude; `slew_limit` caps its rate of change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorChannel {
    pub channel: Channel,
    pub peak_force: f64,
    pub slew_limit: f64,
    pub last_output: f64,
}

/// Measured channel peaks of the reference device, N.
pub const DEFAULT_PEAKS: [f64; 3] = [10.4, 10.1, 10.2];
/// Default slew limit: a 10 N step settles in 20 ms at 1 kHz.
pub const DEFAULT_SLEW: f64 = 500.0;

impl ActuatorChannel {
    pub fn new(channel: Channel, peak_force: f64, slew_limit: f64) -> Result<Self, DeviceError> {
        if peak_force <= 0.0 {
            return Err(DeviceError::BadParameter {
                field: "peak_force",
                value: peak_force,
            });
        }
        if slew_limit <= 0.0 {
            return Err(DeviceError::BadParameter {
                field: "slew_limit",
                value: slew_limit,
            });
        }
        Ok(Self {
            channel,
            peak_force,
            slew_limit,
            last_output: 0.0,
        })
    }

    pub fn defaults() -> [Self; 3] {
        [
            Self::new(Channel::Thumb, DEFAULT_PEAKS[0], DEFAULT_SLEW).unwrap(),
            Self::new(Channel::Index, DEFAULT_PEAKS[1], DEFAULT_SLEW).unwrap(),
            Self::new(Channel::Middle, DEFAULT_PEAKS[2], DEFAULT_SLEW).unwrap(),
        ]
    }

    /// Apply a force demand for one interval of length `dt`: the demand is
    /// clamped to the peak, then the change from the last output is limited
    /// to `slew_limit * dt`.
    pub fn command_force(&mut self, demand: f64, dt: f64) -> f64 {
        debug_assert!(dt > 0.0);
        let target = demand.clamp(-self.peak_force, self.peak_force);
        let max_delta = self.slew_limit * dt;
        let delta = (target - self.last_output).clamp(-max_delta, max_delta);
        self.last_output += delta;
        self.last_output
    }
}

/// Fixed-rate simulation clock. Time is derived as tick_index / tick_rate
/// on every read, never accumulated, so it cannot drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimClock {
    pub tick_rate: u32,
    pub tick_index: u64,
}

impl SimClock {
    pub fn new(tick_rate: u32) -> Result<Self, DeviceError> {
        if tick_rate == 0 {
            return Err(DeviceError::BadTickRate);
        }
        Ok(Self {
            tick_rate,
            tick_index: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.tick_index as f64 / self.tick_rate as f64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate as f64
    }

    #[must_use]
    pub fn advance(&self) -> Self {
        Self {
            tick_rate: self.tick_rate,
            tick_index: self.tick_index + 1,
        }
    }
}
