use std::fmt::Display;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use anyhow::anyhow;
use flashguard::frameio::{parse_y4m, read_video, write_video, RawRgbReader};
use flashguard::prelude::*;
use flashguard::reporting::to_fixed_json;
use log::warn;

use crate::{AnalyzeArgs, CacheAction, GenArgs, InputArgs, SanitizeArgs};

/// Exit code 2 for bad input or usage, 3 for anything else.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    fn context(self, msg: impl Display + Send + Sync + 'static) -> Self {
        Self {
            code: self.code,
            error: self.error.context(msg),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Self {
            code,
            error: e.into(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn is_stdin(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn format_for(
    path: &Path,
    explicit: Option<VideoFormat>,
) -> std::result::Result<VideoFormat, Failure> {
    explicit
        .or_else(|| VideoFormat::detect(path))
        .ok_or_else(|| {
            Failure::input(anyhow!(
                "cannot tell the video format of `{}`; pass it explicitly (y4m, ppm or raw)",
                path.display()
            ))
        })
}

fn load(args: &InputArgs) -> std::result::Result<(VideoStream, VideoFormat), Failure> {
    let path = &args.input;
    if is_stdin(path) {
        let format = args.format.unwrap_or(VideoFormat::RawRgb24);
        let stdin = io::stdin().lock();
        let stream = match format {
            VideoFormat::Y4m => parse_y4m(stdin),
            VideoFormat::RawRgb24 => {
                let (Some(geometry), Some(fps)) = (args.geometry, args.fps) else {
                    return Err(Failure::input(anyhow!(
                        "raw RGB24 on stdin needs --geometry and --fps"
                    )));
                };
                RawRgbReader::new(stdin, geometry, fps).read_stream()
            }
            VideoFormat::PpmSequence => {
                return Err(Failure::input(anyhow!(
                    "a PPM sequence cannot be read from stdin"
                )));
            }
        };
        return Ok((
            stream.map_err(|e| Failure::from(e).context("reading stdin"))?,
            format,
        ));
    }
    if !path.exists() {
        return Err(Failure::input(anyhow!(
            "`{}` does not exist",
            path.display()
        )));
    }
    let format = format_for(path, args.format)?;
    let stream = read_video(path, format, args.geometry, args.fps)
        .map_err(|e| Failure::from(e).context(format!("reading `{}`", path.display())))?;
    Ok((stream, format))
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes)
        .map_err(|e| Failure::input(e).context(format!("writing `{}`", path.display())))
}

fn print_summary(report: &AnalysisReport) {
    println!(
        "frames: {} ({} at {} fps)",
        report.frame_count, report.geometry, report.fps
    );
    println!("possible triggers: {}", report.num_triggers);
    if !report.timestamps_s.is_empty() {
        let stamps: Vec<String> = report
            .timestamps_s
            .iter()
            .map(|t| format!("{t:.3}"))
            .collect();
        println!("harmful extremes at (s): {}", stamps.join(", "));
    }
}

fn open_cache() -> Option<ReportCache> {
    match ReportCache::from_env() {
        Ok(c) => Some(c),
        Err(e) => {
            warn!("report cache disabled: {e}");
            None
        }
    }
}

pub fn analyze(args: AnalyzeArgs) -> CmdResult {
    let cfg = args.detect.config();
    cfg.validate()?;
    let (stream, _) = load(&args.input)?;
    let source = SourceInfo::of_stream(&stream);
    let cache = if args.no_cache { None } else { open_cache() };

    let cached = cache
        .as_ref()
        .and_then(|c| match c.lookup(&source.digest, &cfg) {
            Ok(hit) => hit,
            Err(e) => {
                warn!("cache lookup failed: {e}");
                None
            }
        });
    let report = match cached {
        Some(report) => {
            println!("cache hit: {}", source.digest);
            report
        }
        None => {
            let started = Instant::now();
            let analysis = analyze_stream(&stream, &cfg)?;
            let runtime_ms = if args.timing {
                started.elapsed().as_millis() as u64
            } else {
                0
            };
            let report = AnalysisReport::new(&analysis, &source, &cfg, runtime_ms);
            if let Some(c) = &cache {
                if let Err(e) = c.store(&report) {
                    warn!("could not cache report: {e}");
                }
            }
            report
        }
    };
    print_summary(&report);
    if let Some(path) = &args.json {
        write_file(path, &report.to_json())?;
    }
    Ok(())
}

pub fn sanitize(args: SanitizeArgs) -> CmdResult {
    let acfg = args.detect.config();
    let scfg = SanitizeConfig {
        level_seconds: args.level_seconds,
        max_iterations: args.iterations,
    };
    acfg.validate()?;
    scfg.validate()?;
    let (stream, in_format) = load(&args.input)?;
    let out_format = match args
        .out_format
        .or_else(|| VideoFormat::detect(&args.output))
    {
        Some(f) => f,
        None if !is_stdin(&args.input.input) => in_format,
        None => format_for(&args.output, None)?,
    };

    let mut outcome = sanitize_iterative(&stream, &acfg, &scfg)?;
    if !args.timing {
        outcome
            .passes
            .iter_mut()
            .for_each(|p| p.report.runtime_ms = 0);
    }
    for (i, pass) in outcome.passes.iter().enumerate() {
        println!(
            "pass {}: {} possible triggers, {} frames cut",
            i + 1,
            pass.report.num_triggers,
            pass.plan.removal_frames.len()
        );
    }
    let cut_last = outcome.passes.last().is_some_and(|p| !p.plan.is_empty());
    let final_count = if cut_last {
        analyze_stream(&outcome.stream, &acfg)?.num_triggers()
    } else {
        outcome.last_trigger_count()
    };

    if let Some(path) = &args.reports {
        let reports: Vec<&AnalysisReport> = outcome.reports().collect();
        write_file(path, &with_newline(to_fixed_json(&reports)?))?;
    }
    if let Some(path) = &args.plan {
        let plans: Vec<&CutPlan> = outcome.passes.iter().map(|p| &p.plan).collect();
        write_file(path, &with_newline(to_fixed_json(&plans)?))?;
    }
    if outcome.stream.is_empty() {
        println!("every frame was cut; no video written");
    } else {
        write_video(&outcome.stream, out_format, &args.output).map_err(|e| {
            Failure::from(e).context(format!("writing `{}`", args.output.display()))
        })?;
        println!(
            "wrote {} of {} frames to {}",
            outcome.stream.len(),
            stream.len(),
            args.output.display()
        );
    }
    println!("final possible triggers: {final_count}");
    Ok(())
}

fn with_newline(mut bytes: Vec<u8>) -> Vec<u8> {
    bytes.push(b'\n');
    bytes
}

pub fn gen(args: GenArgs) -> CmdResult {
    let spec = StrobeSpec {
        geometry: FrameGeometry::new(args.width, args.height)?,
        fps: args.fps,
        duration_frames: args.frames,
        period_frames: args.period,
        low_gray: args.low,
        high_gray: args.high,
        region_fraction: args.region,
    };
    spec.validate()?;
    let format = format_for(&args.output, args.format)?;
    let cfg = if args.strict {
        AnalysisConfig::strict()
    } else {
        AnalysisConfig::default()
    };
    let stream = gen_strobe(&spec)?;
    let expected = expected_triggers(&spec, &cfg)?;
    write_video(&stream, format, &args.output)
        .map_err(|e| Failure::from(e).context(format!("writing `{}`", args.output.display())))?;
    println!("wrote {} frames to {}", stream.len(), args.output.display());
    println!("expected triggers: {expected}");
    Ok(())
}

pub fn cache(action: CacheAction) -> CmdResult {
    let cache = ReportCache::from_env()?;
    match action {
        CacheAction::Path => println!("{}", cache.dir().display()),
        CacheAction::List => {
            for digest in cache.entries()? {
                println!("{digest}");
            }
        }
        CacheAction::Clear => {
            let n = cache.clear()?;
            println!("removed {n} cached reports");
        }
    }
    Ok(())
}
