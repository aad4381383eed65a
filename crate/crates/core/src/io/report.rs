//! Report emission: tick logs and metric tables as comma-separated text,
//! summaries as structured text. All numeric output is fixed-point with six
//! decimals, SI units, `.` decimal separator, LF line endings.

use std::fmt::Write as _;

use super::replay::{ReplayReport, TickRecord};
use super::{ForceFrame, FormatError};
use crate::metrics::{summarize_series, StreamAnalysis, SummaryStats};

pub const TICKS_HEADER: &str = "tick,time,phase,vf1_fx,vf1_fy,vf1_fz,vf1_f,vf2_fx,vf2_fy,vf2_fz,vf2_f,vf3_fx,vf3_fy,vf3_fz,vf3_f,act_thumb,act_index,act_middle,perc_1,perc_2,perc_3,obj_x,obj_y,obj_z,contacts,closure";

pub const METRICS_HEADER: &str = "timestamp_s,yaw_rad,pitch_rad,roll_rad,grasp_angle_rad,sphere_cx_m,sphere_cy_m,sphere_cz_m,sphere_radius_m,pinch_distance_m,angle_thumb_index_rad,angle_index_middle_rad,angle_thumb_middle_rad,wrist_x_m,wrist_y_m,wrist_z_m,palm_x_m,palm_y_m,palm_z_m,grabbing";

/// Fixed-point six decimals; negative zero collapses to zero so equal
/// values always print identically.
fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// The per-tick log as CSV.
pub fn ticks_csv(report: &ReplayReport) -> String {
    let mut out = String::with_capacity(128 * (report.ticks.len() + 1));
    out.push_str(TICKS_HEADER);
    out.push('\n');
    for t in &report.ticks {
        write_tick(&mut out, t);
    }
    out
}

fn write_tick(out: &mut String, t: &TickRecord) {
    let _ = write!(out, "{},{},{}", t.tick, num(t.time), t.phase);
    for k in 0..3 {
        let f = t.vf_force[k];
        let _ = write!(
            out,
            ",{},{},{},{}",
            num(f.x),
            num(f.y),
            num(f.z),
            num(t.vf_magnitude[k])
        );
    }
    let _ = write!(
        out,
        ",{},{},{}",
        num(t.actuator[0]),
        num(t.actuator[1]),
        num(t.actuator[2])
    );
    let _ = write!(
        out,
        ",{},{},{}",
        num(t.perception[0]),
        num(t.perception[1]),
        num(t.perception[2])
    );
    let _ = write!(
        out,
        ",{},{},{},{},{}\n",
        num(t.object_position.x),
        num(t.object_position.y),
        num(t.object_position.z),
        t.contact_count,
        u8::from(t.closure)
    );
}

/// Human-readable replay summary: outcome, per-finger force summaries over
/// contact ticks, and the metric summaries of the input stream.
pub fn summary_text(report: &ReplayReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "replay summary");
    let _ = writeln!(out, "==============");
    let _ = writeln!(out, "ticks: {}", report.ticks.len());
    let _ = writeln!(out, "tick_rate_hz: {}", report.tick_rate);
    let _ = writeln!(out, "outcome: {}", report.final_state.phase);
    let _ = writeln!(out, "hold_time_s: {}", num(report.final_state.hold_time));
    let _ = writeln!(
        out,
        "final_contacts: {}",
        report.final_state.contact_count
    );
    let _ = writeln!(
        out,
        "final_closure: {}",
        u8::from(report.final_state.closure)
    );
    out.push('\n');
    let _ = writeln!(out, "rendered force per virtual finger (contact ticks, N)");
    for (k, label) in ["vf1_thumb", "vf2_index", "vf3_middle_group"]
        .iter()
        .enumerate()
    {
        let mags: Vec<f64> = report
            .ticks
            .iter()
            .filter(|t| t.vf_magnitude[k] > 0.0)
            .map(|t| t.vf_magnitude[k])
            .collect();
        match summarize_series(&mags) {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{label}: n={} min={} mean={} max={}",
                    s.n,
                    num(s.min),
                    num(s.mean),
                    num(s.max)
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{label}: no contact");
            }
        }
    }
    out.push('\n');
    out.push_str(&stats_text(&report.analysis));
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

/// The metric table as CSV, one row per frame. Degenerate sphere fits leave
/// their cells empty.
pub fn metrics_csv(analysis: &StreamAnalysis) -> String {
    let mut out = String::with_capacity(96 * (analysis.rows.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in &analysis.rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            num(r.timestamp),
            num(r.yaw),
            num(r.pitch),
            num(r.roll),
            opt(r.grasp_angle)
        );
        let _ = write!(
            out,
            ",{},{},{},{}",
            opt(r.sphere_center.map(|c| c.x)),
            opt(r.sphere_center.map(|c| c.y)),
            opt(r.sphere_center.map(|c| c.z)),
            opt(r.sphere_radius)
        );
        let _ = write!(
            out,
            ",{},{},{},{}",
            num(r.pinch_distance),
            num(r.angle_thumb_index),
            num(r.angle_index_middle),
            num(r.angle_thumb_middle)
        );
        let _ = write!(
            out,
            ",{},{},{},{},{},{},{}\n",
            num(r.wrist.x),
            num(r.wrist.y),
            num(r.wrist.z),
            num(r.palm.x),
            num(r.palm.y),
            num(r.palm.z),
            u8::from(r.grabbing)
        );
    }
    out
}

/// Per-metric summary report keyed by column name.
pub fn stats_text(analysis: &StreamAnalysis) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "metric summaries ({} rows{})",
        analysis.rows.len(),
        if analysis.grabbing_only {
            ", grabbing rows only"
        } else {
            ""
        }
    );
    for (name, result) in &analysis.columns {
        match result {
            Ok(s) => {
                let _ = writeln!(out, "[{name}]");
                write_stats(&mut out, s);
                // The grasp-angle unit convention is ambiguous in tracker
                // reports; print degrees alongside radians.
                if name == "grasp_angle_rad" {
                    let to_deg = 180.0 / std::f64::consts::PI;
                    let _ = writeln!(
                        out,
                        "  mean_deg={} sd_deg={} iqr_deg={}",
                        num(s.mean * to_deg),
                        num(s.sd * to_deg),
                        num(s.iqr * to_deg)
                    );
                }
            }
            Err(reason) => {
                let _ = writeln!(out, "[{name}]");
                let _ = writeln!(out, "  unavailable: {reason}");
            }
        }
    }
    out
}

fn write_stats(out: &mut String, s: &SummaryStats) {
    let _ = writeln!(
        out,
        "  n={} mean={} sd={} min={} q1={} median={} q3={} max={} iqr={}",
        s.n,
        num(s.mean),
        num(s.sd),
        num(s.min),
        num(s.q1),
        num(s.median),
        num(s.q3),
        num(s.max),
        num(s.iqr)
    );
    let _ = writeln!(
        out,
        "  qq_corr={} qq_corr_iqr={} degenerate={} normal_within_iqr={}",
        num(s.qq_corr),
        num(s.qq_corr_iqr),
        u8::from(s.degenerate),
        u8::from(s.normal_within_iqr())
    );
}

/// Rendered channel magnitudes read back from a ticks.csv emitted by this
/// crate: (vf1, vf2, vf3) per tick.
pub fn parse_ticks_csv(text: &str) -> Result<Vec<[f64; 3]>, FormatError> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::Scene("empty ticks file".into()));
    };
    if header != TICKS_HEADER {
        return Err(FormatError::Line {
            line: 1,
            message: "unexpected ticks.csv header".into(),
        });
    }
    let header_fields: Vec<&str> = TICKS_HEADER.split(',').collect();
    let idx = |name: &str| header_fields.iter().position(|f| *f == name).unwrap();
    let cols = [idx("vf1_f"), idx("vf2_f"), idx("vf3_f")];
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != header_fields.len() {
            return Err(FormatError::Line {
                line,
                message: format!("expected {} fields, got {}", header_fields.len(), fields.len()),
            });
        }
        let mut mags = [0.0; 3];
        for (k, &c) in cols.iter().enumerate() {
            mags[k] = fields[c].parse().map_err(|_| FormatError::Line {
                line,
                message: format!("bad number `{}`", fields[c]),
            })?;
        }
        out.push(mags);
    }
    Ok(out)
}

/// Side-by-side range comparison between rendered channel forces and a
/// recorded FSR log.
pub fn compare_text(rendered: &[[f64; 3]], fsr: &[ForceFrame]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "force range comparison (N)");
    let _ = writeln!(out, "==========================");
    let _ = writeln!(out, "rendered (virtual fingers)");
    for (k, label) in ["vf1_thumb", "vf2_index", "vf3_middle_group"]
        .iter()
        .enumerate()
    {
        let vals: Vec<f64> = rendered
            .iter()
            .map(|r| r[k])
            .filter(|&v| v > 0.0)
            .collect();
        write_range(&mut out, label, &vals);
    }
    let _ = writeln!(out, "recorded (FSR per finger)");
    for (k, label) in ["thumb", "index", "middle", "ring", "little"]
        .iter()
        .enumerate()
    {
        let vals: Vec<f64> = fsr
            .iter()
            .map(|f| f.forces[k])
            .filter(|&v| v > 0.0)
            .collect();
        write_range(&mut out, label, &vals);
    }
    out
}

fn write_range(out: &mut String, label: &str, vals: &[f64]) {
    match summarize_series(vals) {
        Ok(s) => {
            let _ = writeln!(
                out,
                "{label}: n={} min={} mean={} max={}",
                s.n,
                num(s.min),
                num(s.mean),
                num(s.max)
            );
        }
        Err(_) => {
            let _ = writeln!(out, "{label}: no samples above zero");
        }
    }
}
