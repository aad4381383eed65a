//! Hand-tracking and force-log stream formats: newline-delimited JSON
//! records, one object per line, positions in millimeters on the wire and
//! SI meters internally.

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::FormatError;
use crate::geometry::Orientation;

const MM: f64 = 1e-3;

/// One hand-tracking sample in SI units (meters, seconds). Tips are ordered
/// thumb, index, middle, ring, little.
#[derive(Debug, Clone, PartialEq)]
pub struct HandFrame {
    pub timestamp: f64,
    pub tips: [Point3<f64>; 5],
    pub palm: Point3<f64>,
    pub wrist: Point3<f64>,
    pub orientation: Orientation,
    pub finger_bases: Option<[Point3<f64>; 5]>,
    pub grabbing: bool,
}

/// One recorded fingertip force sample (FSR-style), newtons.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceFrame {
    pub timestamp: f64,
    pub forces: [f64; 5],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireHandFrame {
    timestamp_ms: f64,
    tips: [[f64; 3]; 5],
    palm: [f64; 3],
    wrist: [f64; 3],
    direction: [f64; 3],
    palm_normal: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    finger_bases: Option<[[f64; 3]; 5]>,
    grabbing: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireForceFrame {
    timestamp_ms: f64,
    f: [f64; 5],
}

fn point_mm(v: &[f64; 3]) -> Point3<f64> {
    Point3::new(v[0] * MM, v[1] * MM, v[2] * MM)
}

fn to_mm(p: &Point3<f64>) -> [f64; 3] {
    [p.x / MM, p.y / MM, p.z / MM]
}

/// Check a wire vector that should be unit-length. Deviations up to 0.1 are
/// renormalized (with a warning past 1e-3); anything worse is rejected.
fn unit_vector(
    v: &[f64; 3],
    field: &str,
    line: usize,
    warnings: &mut Vec<String>,
) -> Result<Vector3<f64>, FormatError> {
    let vec = Vector3::new(v[0], v[1], v[2]);
    let norm = vec.norm();
    let deviation = (norm - 1.0).abs();
    if deviation > 0.1 {
        return Err(FormatError::Line {
            line,
            message: format!("{field} is not a unit vector (|v| = {norm:.6})"),
        });
    }
    if deviation > 1e-3 {
        warnings.push(format!(
            "line {line}: renormalized {field} (|v| = {norm:.6})"
        ));
    }
    Ok(vec / norm)
}

/// Parse a hand-frame stream. Returns the frames plus renormalization
/// warnings; malformed lines and non-monotonic timestamps are errors that
/// name the offending line.
pub fn parse_hand_frames(text: &str) -> Result<(Vec<HandFrame>, Vec<String>), FormatError> {
    let mut frames = Vec::new();
    let mut warnings = Vec::new();
    let mut last_ts: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let wire: WireHandFrame =
            serde_json::from_str(trimmed).map_err(|e| FormatError::Line {
                line,
                message: e.to_string(),
            })?;
        if let Some(prev) = last_ts {
            if wire.timestamp_ms <= prev {
                return Err(FormatError::Line {
                    line,
                    message: format!(
                        "timestamps must be strictly increasing: {} ms after {} ms",
                        wire.timestamp_ms, prev
                    ),
                });
            }
        }
        last_ts = Some(wire.timestamp_ms);

        let direction = unit_vector(&wire.direction, "direction", line, &mut warnings)?;
        let palm_normal = unit_vector(&wire.palm_normal, "palm_normal", line, &mut warnings)?;
        let orientation =
            Orientation::new(direction, palm_normal).map_err(|e| FormatError::Line {
                line,
                message: e.to_string(),
            })?;

        frames.push(HandFrame {
            timestamp: wire.timestamp_ms * 1e-3,
            tips: [
                point_mm(&wire.tips[0]),
                point_mm(&wire.tips[1]),
                point_mm(&wire.tips[2]),
                point_mm(&wire.tips[3]),
                point_mm(&wire.tips[4]),
            ],
            palm: point_mm(&wire.palm),
            wrist: point_mm(&wire.wrist),
            orientation,
            finger_bases: wire.finger_bases.map(|bases| {
                [
                    point_mm(&bases[0]),
                    point_mm(&bases[1]),
                    point_mm(&bases[2]),
                    point_mm(&bases[3]),
                    point_mm(&bases[4]),
                ]
            }),
            grabbing: wire.grabbing,
        });
    }
    Ok((frames, warnings))
}

/// Serialize frames to the wire format (one JSON object per line, mm).
pub fn serialize_hand_frames(frames: &[HandFrame]) -> String {
    let mut out = String::new();
    for f in frames {
        let wire = WireHandFrame {
            timestamp_ms: f.timestamp * 1e3,
            tips: [
                to_mm(&f.tips[0]),
                to_mm(&f.tips[1]),
                to_mm(&f.tips[2]),
                to_mm(&f.tips[3]),
                to_mm(&f.tips[4]),
            ],
            palm: to_mm(&f.palm),
            wrist: to_mm(&f.wrist),
            direction: [
                f.orientation.direction.x,
                f.orientation.direction.y,
                f.orientation.direction.z,
            ],
            palm_normal: [
                f.orientation.palm_normal.x,
                f.orientation.palm_normal.y,
                f.orientation.palm_normal.z,
            ],
            finger_bases: f.finger_bases.map(|bases| {
                [
                    to_mm(&bases[0]),
                    to_mm(&bases[1]),
                    to_mm(&bases[2]),
                    to_mm(&bases[3]),
                    to_mm(&bases[4]),
                ]
            }),
            grabbing: f.grabbing,
        };
        out.push_str(&serde_json::to_string(&wire).expect("wire frame serializes"));
        out.push('\n');
    }
    out
}

/// Parse an FSR-style force log: `{"timestamp_ms": t, "f": [f1..f5]}` per
/// line, forces in newtons.
pub fn parse_force_frames(text: &str) -> Result<Vec<ForceFrame>, FormatError> {
    let mut frames = Vec::new();
    let mut last_ts: Option<f64> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let wire: WireForceFrame =
            serde_json::from_str(trimmed).map_err(|e| FormatError::Line {
                line,
                message: e.to_string(),
            })?;
        if wire.f.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(FormatError::Line {
                line,
                message: "forces must be finite and >= 0".into(),
            });
        }
        if let Some(prev) = last_ts {
            if wire.timestamp_ms <= prev {
                return Err(FormatError::Line {
                    line,
                    message: format!(
                        "timestamps must be strictly increasing: {} ms after {} ms",
                        wire.timestamp_ms, prev
                    ),
                });
            }
        }
        last_ts = Some(wire.timestamp_ms);
        frames.push(ForceFrame {
            timestamp: wire.timestamp_ms * 1e-3,
            forces: wire.f,
        });
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn minimal_line(ts: f64) -> String {
        format!(
            concat!(
                "{{\"timestamp_ms\":{},\"tips\":[[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0]],",
                "\"palm\":[0,0,0],\"wrist\":[0,-60,0],\"direction\":[1,0,0],",
                "\"palm_normal\":[0,0,-1],\"grabbing\":false}}"
            ),
            ts
        )
    }

    #[test]
    fn minimal_record_parses() {
        let (frames, warnings) = parse_hand_frames(&minimal_line(0.0)).unwrap();
        assert_eq!(frames.len(), 1);
        assert!(warnings.is_empty());
        let f = &frames[0];
        assert_eq!(f.timestamp, 0.0);
        for tip in &f.tips {
            assert_eq!(*tip, Point3::origin());
        }
        assert_eq!(f.wrist, Point3::new(0.0, -0.06, 0.0));
        assert!(!f.grabbing);
    }

    #[test]
    fn missing_field_names_line_and_field() {
        let line = minimal_line(0.0).replace(",\"wrist\":[0,-60,0]", "");
        let err = parse_hand_frames(&line).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
        assert!(msg.contains("missing field"), "{msg}");
        assert!(msg.contains("wrist"), "{msg}");
    }

    #[test]
    fn non_monotonic_timestamps_name_both() {
        let text = format!("{}\n{}", minimal_line(5.0), minimal_line(5.0));
        let err = parse_hand_frames(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("strictly increasing"), "{msg}");
        assert!(msg.contains('5'), "{msg}");
    }

    #[test]
    fn near_unit_vectors_renormalize_with_warning() {
        let line = minimal_line(0.0).replace("\"direction\":[1,0,0]", "\"direction\":[1.01,0,0]");
        let (frames, warnings) = parse_hand_frames(&line).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("direction"));
        assert!((frames[0].orientation.direction.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn far_from_unit_vectors_rejected() {
        let line = minimal_line(0.0).replace("\"direction\":[1,0,0]", "\"direction\":[1.2,0,0]");
        assert!(parse_hand_frames(&line).is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let line = minimal_line(0.0).replace("\"grabbing\":false", "\"grabbing\":false,\"xyz\":1");
        let err = parse_hand_frames(&line).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    // Round-trip oracle: serialize then parse is lossless well below the
    // 1e-9 mm bound (f64 JSON round-trips exactly).
    #[test]
    fn round_trip_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(2718);
        let mut frames = Vec::new();
        for i in 0..1000 {
            let mut rp = |scale: f64| {
                Point3::new(
                    rng.random_range(-scale..scale),
                    rng.random_range(-scale..scale),
                    rng.random_range(-scale..scale),
                )
            };
            let tips = [rp(0.2), rp(0.2), rp(0.2), rp(0.2), rp(0.2)];
            let palm = rp(0.2);
            let wrist = rp(0.2);
            frames.push(HandFrame {
                timestamp: i as f64 * 0.01,
                tips,
                palm,
                wrist,
                orientation: Orientation::from_euler(
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-1.4..1.4),
                    rng.random_range(-3.0..3.0),
                ),
                finger_bases: None,
                grabbing: rng.random_bool(0.5),
            });
        }
        let text = serialize_hand_frames(&frames);
        let (reparsed, warnings) = parse_hand_frames(&text).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(reparsed.len(), frames.len());
        for (a, b) in frames.iter().zip(&reparsed) {
            assert!((a.timestamp - b.timestamp).abs() < 1e-12);
            for k in 0..5 {
                assert!((a.tips[k] - b.tips[k]).norm() < 1e-12);
            }
            assert!((a.orientation.direction - b.orientation.direction).norm() < 1e-12);
            assert_eq!(a.grabbing, b.grabbing);
        }
    }

    #[test]
    fn force_frames_parse_and_validate() {
        let ok = "{\"timestamp_ms\":0,\"f\":[1,2,3,4,5]}\n{\"timestamp_ms\":10,\"f\":[0,0,0,0,0]}";
        let frames = parse_force_frames(ok).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[0].forces[2], 3.0);

        let negative = "{\"timestamp_ms\":0,\"f\":[-1,0,0,0,0]}";
        assert!(parse_force_frames(negative).is_err());
        let backwards = "{\"timestamp_ms\":5,\"f\":[0,0,0,0,0]}\n{\"timestamp_ms\":4,\"f\":[0,0,0,0,0]}";
        assert!(parse_force_frames(backwards).is_err());
    }
}
