//! Grasp characterization metrics computed from hand-tracking streams:
//! hand rotation, grasp angle, sphere of grasp, pinch distance,
//! inter-finger angles, and summary statistics in the reporting style of
//! the characterization study (quartiles, IQR, Q-Q normality).

use nalgebra::{Point3, Vector3};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::geometry::{euler_decompose, fit_sphere, GeometryError};
use crate::io::HandFrame;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("insufficient data: need at least {need} values, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("wrist and palm coincide; grasp angle undefined")]
    CoincidentWristPalm,
    #[error("degenerate ray from palm base to finger base {0}")]
    DegenerateRay(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Distribution summary of a scalar series. `sd` is the population standard
/// deviation (divisor n); quartiles interpolate order statistics at
/// positions (n-1)p; `qq_corr` is the Pearson correlation between the
/// sorted sample and standard-normal quantiles at (i - 0.5)/n. A constant
/// series is flagged `degenerate` and reports zero correlations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub qq_corr: f64,
    /// Q-Q correlation restricted to samples between q1 and q3.
    pub qq_corr_iqr: f64,
    pub degenerate: bool,
}

impl SummaryStats {
    /// Normality verdict used by the reports: the Q-Q plot is close to
    /// linear inside the interquartile range.
    pub fn normal_within_iqr(&self) -> bool {
        !self.degenerate && self.qq_corr_iqr > 0.99
    }
}

/// Per-frame metric row. Sphere-of-grasp fields are absent when the frame
/// geometry is degenerate (coplanar points); the row itself is still
/// emitted so tables keep one line per frame.
#[derive(Debug, Clone)]
pub struct HandMetricsRow {
    pub timestamp: f64,
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub grasp_angle: Option<f64>,
    pub sphere_center: Option<Point3<f64>>,
    pub sphere_radius: Option<f64>,
    pub pinch_distance: f64,
    pub angle_thumb_index: f64,
    pub angle_index_middle: f64,
    pub angle_thumb_middle: f64,
    pub wrist: Point3<f64>,
    pub palm: Point3<f64>,
    pub grabbing: bool,
}

/// Summary statistics of the scalar series `xs` (n >= 2).
pub fn summarize_series(xs: &[f64]) -> Result<SummaryStats, MetricsError> {
    let n = xs.len();
    if n < 2 {
        return Err(MetricsError::InsufficientData { need: 2, got: n });
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let var = sorted.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    let q1 = quantile_type7(&sorted, 0.25);
    let median = quantile_type7(&sorted, 0.5);
    let q3 = quantile_type7(&sorted, 0.75);
    let degenerate = sd == 0.0;

    let (qq_corr, qq_corr_iqr) = if degenerate {
        (0.0, 0.0)
    } else {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let z: Vec<f64> = (0..n)
            .map(|i| normal.inverse_cdf((i as f64 + 0.5) / n as f64))
            .collect();
        let full = pearson(&sorted, &z).unwrap_or(0.0);
        let idx: Vec<usize> = (0..n).filter(|&i| sorted[i] >= q1 && sorted[i] <= q3).collect();
        let sub_x: Vec<f64> = idx.iter().map(|&i| sorted[i]).collect();
        let sub_z: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
        let iqr_corr = pearson(&sub_x, &sub_z).unwrap_or(0.0);
        (full, iqr_corr)
    };

    Ok(SummaryStats {
        n,
        mean,
        sd,
        min: sorted[0],
        max: sorted[n - 1],
        q1,
        median,
        q3,
        iqr: q3 - q1,
        qq_corr,
        qq_corr_iqr,
        degenerate,
    })
}

/// Linear interpolation of order statistics at position (n-1)p.
fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = (n - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < n {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[n - 1]
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Angle between two vectors in [0, pi] via the length-stable atan2 form.
fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Angle of the hand direction against the wrist-to-palm vector, radians.
pub fn grasp_angle(f: &HandFrame) -> Result<f64, MetricsError> {
    let wrist_to_palm = f.palm - f.wrist;
    if wrist_to_palm.norm() < 1e-12 {
        return Err(MetricsError::CoincidentWristPalm);
    }
    Ok(angle_between(&f.orientation.direction, &wrist_to_palm))
}

/// Distance from the thumb tip to the nearest other fingertip, meters.
pub fn pinch_distance(f: &HandFrame) -> f64 {
    let thumb = f.tips[0];
    f.tips[1..]
        .iter()
        .map(|tip| (thumb - tip).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Sphere of grasp: least-squares sphere through the five fingertips and
/// the palm position.
pub fn grasp_sphere(f: &HandFrame) -> Result<(Point3<f64>, f64), MetricsError> {
    let mut points = f.tips.to_vec();
    points.push(f.palm);
    Ok(fit_sphere(&points)?)
}

/// Angles between the palm-base rays to the thumb, index, and middle finger
/// bases: (thumb-index, index-middle, thumb-middle), radians.
///
/// When the stream carries no finger bases the fingertips stand in for
/// them; `reconstructed` flags that substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerAngles {
    pub thumb_index: f64,
    pub index_middle: f64,
    pub thumb_middle: f64,
    pub reconstructed: bool,
}

pub fn inter_finger_angles(f: &HandFrame) -> Result<FingerAngles, MetricsError> {
    let (bases, reconstructed) = match &f.finger_bases {
        Some(b) => (*b, false),
        None => (f.tips, true),
    };
    let ray = |i: usize| -> Result<Vector3<f64>, MetricsError> {
        let r = bases[i] - f.palm;
        if r.norm() < 1e-12 {
            return Err(MetricsError::DegenerateRay(i + 1));
        }
        Ok(r)
    };
    let thumb = ray(0)?;
    let index = ray(1)?;
    let middle = ray(2)?;
    Ok(FingerAngles {
        thumb_index: angle_between(&thumb, &index),
        index_middle: angle_between(&index, &middle),
        thumb_middle: angle_between(&thumb, &middle),
        reconstructed,
    })
}

/// Metric table plus per-column summaries for a frame stream.
#[derive(Debug, Clone)]
pub struct StreamAnalysis {
    pub rows: Vec<HandMetricsRow>,
    /// Column name paired with its summary, or the failure that prevented
    /// one (insufficient valid rows after filtering).
    pub columns: Vec<(String, Result<SummaryStats, String>)>,
    /// True when only grabbing rows fed the summaries.
    pub grabbing_only: bool,
}

/// Compute every metric row, then summary statistics per column. With
/// `grabbing_only`, rows with `grabbing = false` are excluded from the
/// statistics (the table always holds every frame).
pub fn analyze_stream(
    frames: &[HandFrame],
    grabbing_only: bool,
) -> Result<StreamAnalysis, MetricsError> {
    if frames.len() < 2 {
        return Err(MetricsError::InsufficientData {
            need: 2,
            got: frames.len(),
        });
    }
    let rows: Vec<HandMetricsRow> = frames.iter().map(metrics_row).collect();

    let selected: Vec<&HandMetricsRow> = rows
        .iter()
        .filter(|r| !grabbing_only || r.grabbing)
        .collect();

    let mut columns = Vec::new();
    let mut push = |name: &str, values: Vec<f64>| {
        let result = summarize_series(&values).map_err(|e| e.to_string());
        columns.push((name.to_string(), result));
    };

    push("yaw_rad", selected.iter().map(|r| r.yaw).collect());
    push("pitch_rad", selected.iter().map(|r| r.pitch).collect());
    push("roll_rad", selected.iter().map(|r| r.roll).collect());
    push(
        "grasp_angle_rad",
        selected.iter().filter_map(|r| r.grasp_angle).collect(),
    );
    for (name, pick) in [
        ("sphere_cx_m", 0usize),
        ("sphere_cy_m", 1),
        ("sphere_cz_m", 2),
    ] {
        push(
            name,
            selected
                .iter()
                .filter_map(|r| r.sphere_center.map(|c| c.coords[pick]))
                .collect(),
        );
    }
    push(
        "sphere_radius_m",
        selected.iter().filter_map(|r| r.sphere_radius).collect(),
    );
    push(
        "pinch_distance_m",
        selected.iter().map(|r| r.pinch_distance).collect(),
    );
    push(
        "angle_thumb_index_rad",
        selected.iter().map(|r| r.angle_thumb_index).collect(),
    );
    push(
        "angle_index_middle_rad",
        selected.iter().map(|r| r.angle_index_middle).collect(),
    );
    push(
        "angle_thumb_middle_rad",
        selected.iter().map(|r| r.angle_thumb_middle).collect(),
    );
    for (name, pick) in [("wrist_x_m", 0usize), ("wrist_y_m", 1), ("wrist_z_m", 2)] {
        push(name, selected.iter().map(|r| r.wrist.coords[pick]).collect());
    }
    for (name, pick) in [("palm_x_m", 0usize), ("palm_y_m", 1), ("palm_z_m", 2)] {
        push(name, selected.iter().map(|r| r.palm.coords[pick]).collect());
    }

    Ok(StreamAnalysis {
        rows,
        columns,
        grabbing_only,
    })
}

fn metrics_row(f: &HandFrame) -> HandMetricsRow {
    let euler = euler_decompose(&f.orientation).ok();
    let (yaw, pitch, roll) = euler.map(|e| (e.yaw, e.pitch, e.roll)).unwrap_or_default();
    let sphere = grasp_sphere(f).ok();
    let angles = inter_finger_angles(f).ok();
    HandMetricsRow {
        timestamp: f.timestamp,
        yaw,
        pitch,
        roll,
        grasp_angle: grasp_angle(f).ok(),
        sphere_center: sphere.map(|(c, _)| c),
        sphere_radius: sphere.map(|(_, r)| r),
        pinch_distance: pinch_distance(f),
        angle_thumb_index: angles.map(|a| a.thumb_index).unwrap_or(0.0),
        angle_index_middle: angles.map(|a| a.index_middle).unwrap_or(0.0),
        angle_thumb_middle: angles.map(|a| a.thumb_middle).unwrap_or(0.0),
        wrist: f.wrist,
        palm: f.palm,
        grabbing: f.grabbing,
    }
}
