//! `flashguard` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flashguard::prelude::*;

/// Detect photosensitive flash triggers in uncompressed video and cut them out.
#[derive(Debug, Parser)]
#[command(name = "flashguard", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count possible triggers and optionally write a JSON report.
    Analyze(AnalyzeArgs),
    /// Repeatedly cut windows after harmful frames until none remain.
    Sanitize(SanitizeArgs),
    /// Write a synthetic strobe and print the trigger count it should produce.
    Gen(GenArgs),
    /// Inspect or empty the report cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    /// Print the cache directory.
    Path,
    /// List cached source digests.
    List,
    /// Delete every cached report.
    Clear,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input file, PPM directory, or `-` for stdin.
    input: PathBuf,
    /// Input format (y4m, ppm, raw). Guessed from the path when omitted;
    /// stdin defaults to raw.
    #[arg(long)]
    format: Option<VideoFormat>,
    /// Frame rate, e.g. `30` or `30000/1001`. Required for raw input.
    #[arg(long)]
    fps: Option<FrameRate>,
    /// Frame size as WxH. Required for raw input.
    #[arg(long)]
    geometry: Option<FrameGeometry>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Require every scanned pixel to move in the same direction.
    #[arg(long)]
    strict: bool,
    /// Only count transitions whose darker frame is dim enough.
    #[arg(long)]
    dark_gate: bool,
    /// Mean luminance (cd/m²) below which the dark gate opens.
    #[arg(long, default_value_t = 160.0)]
    dark_gate_limit: f64,
    /// Minimum fraction of the screen a flash must cover.
    #[arg(long, default_value_t = 0.25)]
    area_fraction: f64,
    /// Harmful luminance swing in cd/m².
    #[arg(long, default_value_t = 20.0)]
    threshold: f64,
    /// Treat the run still open at end of stream as an extreme.
    #[arg(long)]
    flush_trailing: bool,
    /// Keep downscaled samples at full precision instead of rounding to 8 bits.
    #[arg(long)]
    no_quantize: bool,
}

impl DetectArgs {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            area_fraction: self.area_fraction,
            flash_threshold: self.threshold,
            scan_mode: if self.strict {
                ScanMode::Strict
            } else {
                ScanMode::Reference
            },
            dark_gate_enabled: self.dark_gate,
            dark_gate_limit: self.dark_gate_limit,
            flush_trailing: self.flush_trailing,
            quantize_downscale: !self.no_quantize,
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    detect: DetectArgs,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Neither read nor write the report cache.
    #[arg(long)]
    no_cache: bool,
    /// Record wall-clock runtime in the report (makes it non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct SanitizeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    detect: DetectArgs,
    /// Output file or PPM directory.
    #[arg(short, long)]
    output: PathBuf,
    /// Output format; guessed from the output path when omitted.
    #[arg(long)]
    out_format: Option<VideoFormat>,
    /// Maximum analyze-and-cut passes.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=5))]
    iterations: u32,
    /// Seconds removed from each harmful frame onward.
    #[arg(long, default_value_t = 5.0)]
    level_seconds: f64,
    /// Write the per-pass cut plans as JSON.
    #[arg(long, value_name = "PATH")]
    plan: Option<PathBuf>,
    /// Write the per-pass reports as JSON.
    #[arg(long, value_name = "PATH")]
    reports: Option<PathBuf>,
    /// Record wall-clock runtime in the reports.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Output file or PPM directory.
    #[arg(short, long)]
    output: PathBuf,
    /// Output format; guessed from the output path when omitted.
    #[arg(long)]
    format: Option<VideoFormat>,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 48)]
    height: usize,
    #[arg(long, default_value = "30")]
    fps: FrameRate,
    /// Number of frames to write (at least 2).
    #[arg(long, default_value_t = 60)]
    frames: usize,
    /// Frames per half cycle.
    #[arg(long, default_value_t = 1)]
    period: usize,
    #[arg(long, default_value_t = 0)]
    low: u8,
    #[arg(long, default_value_t = 255)]
    high: u8,
    /// Fraction of the screen that flashes.
    #[arg(long, default_value_t = 1.0)]
    region: f64,
    /// Compute the expected count under strict scanning.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => commands::analyze(args),
        Command::Sanitize(args) => commands::sanitize(args),
        Command::Gen(args) => commands::gen(args),
        Command::Cache { action } => commands::cache(action),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
