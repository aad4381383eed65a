//! Command-line interface for the tripod haptic grasp toolkit.
//!
//! Exit codes: 0 success, 2 input format error, 3 tunneling abort.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trigrasp_core::io::report::{
    compare_text, metrics_csv, parse_ticks_csv, stats_text, summary_text, ticks_csv,
};
use trigrasp_core::io::synth::{generate, Preset};
use trigrasp_core::io::{
    parse_force_frames, parse_hand_frames, parse_scene, replay, serialize_hand_frames, ReplayError,
};
use trigrasp_core::metrics::analyze_stream;
use trigrasp_core::taxonomy::{load_taxonomy, GraspQuery, GraspType, Opposition, ThumbPosition};

const EXIT_FORMAT: u8 = 2;
const EXIT_TUNNELING: u8 = 3;

#[derive(Parser)]
#[command(name = "trigrasp", version, about = "Three-finger haptic grasp replay and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a hand stream against a scene, writing ticks.csv and summary.txt.
    Replay {
        /// Scene description (TOML).
        #[arg(long)]
        scene: PathBuf,
        /// Hand-frame stream (one JSON record per line).
        #[arg(long)]
        hand: PathBuf,
        /// Tick rate override, Hz.
        #[arg(long)]
        rate: Option<u32>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Compute grasp metrics for a hand stream, writing metrics.csv and stats.txt.
    Analyze {
        #[arg(long)]
        hand: PathBuf,
        /// Restrict summary statistics to frames flagged as grabbing.
        #[arg(long)]
        grabbing_only: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the grasp taxonomy (optionally filtered) as CSV.
    Taxonomy {
        /// Grasp type: power, precision, or intermediate.
        #[arg(long = "type")]
        grasp_type: Option<String>,
        /// Opposition: palm, pad, or side.
        #[arg(long)]
        opposition: Option<String>,
        /// Thumb position: abducted or adducted.
        #[arg(long)]
        thumb: Option<String>,
        /// Keep classes needing at most this many fingers.
        #[arg(long)]
        max_min_fingers: Option<u8>,
    },
    /// Compare rendered channel forces against a recorded FSR log.
    Compare {
        /// ticks.csv from a replay run.
        #[arg(long)]
        rendered: PathBuf,
        /// FSR force log (one JSON record per line).
        #[arg(long)]
        fsr: PathBuf,
    },
    /// Generate a synthetic hand stream for one of the shipped presets.
    Gen {
        /// tripod-press, grasp-lift, or free-motion.
        #[arg(long)]
        preset: String,
        #[arg(long)]
        seed: u64,
        /// Frame count override (frames are spaced at 100 Hz).
        #[arg(long)]
        frames: Option<usize>,
        /// Write the stream here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the preset's matching scene file.
        #[arg(long)]
        emit_scene: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn format(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FORMAT,
            message: message.into(),
        }
    }

    fn other(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::format(format!("cannot read {}: {e}", path.display())))
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::other(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::other(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Replay {
            scene,
            hand,
            rate,
            out,
        } => {
            let scene = parse_scene(&read(&scene)?).map_err(|e| CliError::format(e.to_string()))?;
            let (frames, warnings) =
                parse_hand_frames(&read(&hand)?).map_err(|e| CliError::format(e.to_string()))?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let report = replay(&scene, &frames, rate).map_err(|e| match e {
                ReplayError::Tunneling { .. } => CliError {
                    code: EXIT_TUNNELING,
                    message: e.to_string(),
                },
                ReplayError::TooFewFrames(_) => CliError::format(e.to_string()),
                other => CliError::other(other.to_string()),
            })?;
            write_out(&out, "ticks.csv", &ticks_csv(&report))?;
            write_out(&out, "summary.txt", &summary_text(&report))?;
            eprintln!(
                "replayed {} ticks at {} Hz; outcome {}",
                report.ticks.len(),
                report.tick_rate,
                report.outcome()
            );
            Ok(())
        }
        Command::Analyze {
            hand,
            grabbing_only,
            out,
        } => {
            let (frames, warnings) =
                parse_hand_frames(&read(&hand)?).map_err(|e| CliError::format(e.to_string()))?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let analysis = analyze_stream(&frames, grabbing_only)
                .map_err(|e| CliError::format(e.to_string()))?;
            write_out(&out, "metrics.csv", &metrics_csv(&analysis))?;
            write_out(&out, "stats.txt", &stats_text(&analysis))?;
            eprintln!("analyzed {} frames", analysis.rows.len());
            Ok(())
        }
        Command::Taxonomy {
            grasp_type,
            opposition,
            thumb,
            max_min_fingers,
        } => {
            let table = load_taxonomy().map_err(|e| CliError::other(e.to_string()))?;
            let query = GraspQuery {
                grasp_type: grasp_type.as_deref().map(parse_grasp_type).transpose()?,
                opposition: opposition.as_deref().map(parse_opposition).transpose()?,
                thumb: thumb.as_deref().map(parse_thumb).transpose()?,
                max_min_fingers,
            };
            println!("{}", trigrasp_core::taxonomy::EXPORT_HEADER);
            let classes: Vec<_> = if query.is_empty() {
                table.classes().iter().collect()
            } else {
                table
                    .filter(&query)
                    .map_err(|e| CliError::format(e.to_string()))?
            };
            for c in classes {
                println!("{}", c.export_row());
            }
            Ok(())
        }
        Command::Compare { rendered, fsr } => {
            let ticks =
                parse_ticks_csv(&read(&rendered)?).map_err(|e| CliError::format(e.to_string()))?;
            let fsr =
                parse_force_frames(&read(&fsr)?).map_err(|e| CliError::format(e.to_string()))?;
            print!("{}", compare_text(&ticks, &fsr));
            Ok(())
        }
        Command::Gen {
            preset,
            seed,
            frames,
            out,
            emit_scene,
        } => {
            let preset = Preset::parse(&preset).ok_or_else(|| {
                CliError::format(format!(
                    "unknown preset `{preset}`; expected tripod-press, grasp-lift, or free-motion"
                ))
            })?;
            let (_, stream) = generate(preset, seed, frames);
            let text = serialize_hand_frames(&stream);
            match out {
                Some(path) => fs::write(&path, text).map_err(|e| {
                    CliError::other(format!("cannot write {}: {e}", path.display()))
                })?,
                None => print!("{text}"),
            }
            if let Some(path) = emit_scene {
                fs::write(&path, preset.scene_toml()).map_err(|e| {
                    CliError::other(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            Ok(())
        }
    }
}

fn parse_grasp_type(s: &str) -> Result<GraspType, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "power" => Ok(GraspType::Power),
        "precision" => Ok(GraspType::Precision),
        "intermediate" => Ok(GraspType::Intermediate),
        _ => Err(CliError::format(format!(
            "unknown grasp type `{s}`; expected power, precision, or intermediate"
        ))),
    }
}

fn parse_opposition(s: &str) -> Result<Opposition, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "palm" => Ok(Opposition::Palm),
        "pad" => Ok(Opposition::Pad),
        "side" => Ok(Opposition::Side),
        _ => Err(CliError::format(format!(
            "unknown opposition `{s}`; expected palm, pad, or side"
        ))),
    }
}

fn parse_thumb(s: &str) -> Result<ThumbPosition, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "abducted" => Ok(ThumbPosition::Abducted),
        "adducted" => Ok(ThumbPosition::Adducted),
        _ => Err(CliError::format(format!(
            "unknown thumb position `{s}`; expected abducted or adducted"
        ))),
    }
}
