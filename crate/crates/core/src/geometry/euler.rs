use nalgebra::{Matrix3, Unit, Vector3};

use super::GeometryError;

/// Tracked hand orientation: the pointing direction of the hand and the
/// palm normal. The reference pose has direction = +x and palm normal = -z
/// (palm facing down, x forward-backward, y right-left, z up-down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub direction: Vector3<f64>,
    pub palm_normal: Vector3<f64>,
}

/// Intrinsic z-y-x decomposition R = Rz(yaw) * Ry(pitch) * Rx(roll).
/// `gimbal` marks |pitch| = pi/2, where roll is fixed to 0 by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub gimbal: bool,
}

impl Orientation {
    pub fn new(direction: Vector3<f64>, palm_normal: Vector3<f64>) -> Result<Self, GeometryError> {
        let o = Self {
            direction,
            palm_normal,
        };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (name, v) in [("direction", &self.direction), ("palm_normal", &self.palm_normal)] {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(GeometryError::InvalidShape(format!(
                    "{name} must be unit-length, |v| = {}",
                    v.norm()
                )));
            }
        }
        if self.direction.dot(&self.palm_normal).abs() >= 1.0 - 1e-9 {
            return Err(GeometryError::DegenerateFrame);
        }
        Ok(())
    }

    /// Orientation of the reference pose rotated by Rz(yaw)*Ry(pitch)*Rx(roll).
    pub fn from_euler(yaw: f64, pitch: f64, roll: f64) -> Self {
        let r = rot_zyx(yaw, pitch, roll);
        Self {
            direction: r * Vector3::x(),
            palm_normal: r * (-Vector3::z()),
        }
    }

    /// Rotation matrix taking the reference frame to the measured frame.
    /// The palm normal is re-orthogonalized against the direction, so mildly
    /// skewed tracker frames still produce a proper rotation.
    pub fn rotation(&self) -> Matrix3<f64> {
        let x = Unit::new_normalize(self.direction);
        let z_raw = -self.palm_normal;
        let y = Unit::new_normalize(z_raw.cross(&x));
        let z = x.cross(&y);
        Matrix3::from_columns(&[x.into_inner(), y.into_inner(), z])
    }
}

pub(crate) fn rot_zyx(yaw: f64, pitch: f64, roll: f64) -> Matrix3<f64> {
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sr, cr) = roll.sin_cos();
    let rz = Matrix3::new(cy, -sy, 0.0, sy, cy, 0.0, 0.0, 0.0, 1.0);
    let ry = Matrix3::new(cp, 0.0, sp, 0.0, 1.0, 0.0, -sp, 0.0, cp);
    let rx = Matrix3::new(1.0, 0.0, 0.0, 0.0, cr, -sr, 0.0, sr, cr);
    rz * ry * rx
}

/// Decompose the hand orientation into yaw, pitch, roll with
/// R = Rz(yaw) * Ry(pitch) * Rx(roll). Outputs lie in (-pi, pi].
pub fn euler_decompose(o: &Orientation) -> Result<EulerAngles, GeometryError> {
    o.validate()?;
    let r = o.rotation();
    let r20 = r[(2, 0)];
    let cos_pitch = (r[(0, 0)] * r[(0, 0)] + r[(1, 0)] * r[(1, 0)]).sqrt();
    if cos_pitch < 1e-10 {
        // Gimbal: yaw and roll share an axis; put all of it in yaw.
        Ok(EulerAngles {
            yaw: (-r[(0, 1)]).atan2(r[(1, 1)]),
            pitch: (-r20).atan2(cos_pitch),
            roll: 0.0,
            gimbal: true,
        })
    } else {
        Ok(EulerAngles {
            yaw: r[(1, 0)].atan2(r[(0, 0)]),
            pitch: (-r20).atan2(cos_pitch),
            roll: r[(2, 1)].atan2(r[(2, 2)]),
            gimbal: false,
        })
    }
}
