//! Removal of harmful stretches: fixed-length windows after each harmful
//! frame, merged into a cut plan, applied by frame index, and repeated until
//! the result analyzes clean or the iteration budget runs out.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::analyze_stream;
use crate::error::{Error, Result};
use crate::flashdetect::AnalysisConfig;
use crate::frameio::VideoStream;
use crate::reporting::{AnalysisReport, SourceInfo};

pub const MAX_ITERATIONS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SanitizeConfig {
    /// Seconds removed starting at each harmful frame.
    pub level_seconds: f64,
    /// Analyze-and-cut passes, 1..=5.
    pub max_iterations: u32,
}

impl Default for SanitizeConfig {
    fn default() -> Self {
        Self {
            level_seconds: 5.0,
            max_iterations: 3,
        }
    }
}

impl SanitizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_ITERATIONS).contains(&self.max_iterations) {
            return Err(Error::InvalidConfig(format!(
                "iterations must be between 1 and {MAX_ITERATIONS}, got {}",
                self.max_iterations
            )));
        }
        if !(self.level_seconds > 0.0 && self.level_seconds.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "level_seconds must be positive, got {}",
                self.level_seconds
            )));
        }
        Ok(())
    }

    /// Frames per removal window: `floor(fps * level_seconds)`, at least 1.
    pub fn window_frames(&self, fps: f64) -> usize {
        ((fps * self.level_seconds).floor() as usize).max(1)
    }
}

/// Frames to drop, with the equivalent time intervals for external tools.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CutPlan {
    pub removal_frames: Vec<usize>,
    pub intervals_s: Vec<[f64; 2]>,
}

impl CutPlan {
    /// Builds a plan from arbitrary frame indices (deduplicated and sorted).
    pub fn from_frames(frames: impl IntoIterator<Item = usize>, fps: f64) -> Self {
        let removal_frames: Vec<usize> = frames
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let intervals_s = group_intervals(&removal_frames, fps);
        Self {
            removal_frames,
            intervals_s,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.removal_frames.is_empty()
    }
}

/// Expands each harmful stamp into a window of `window_frames` frames.
/// Stamps already inside the previous window add nothing.
pub fn removal_windows(rem_frm: &[usize], fps: f64, cfg: &SanitizeConfig) -> Vec<usize> {
    let len = cfg.window_frames(fps);
    let mut frames = Vec::new();
    let mut covered_to: Option<usize> = None;
    for &stamp in rem_frm {
        if covered_to.is_none_or(|end| stamp > end) {
            frames.extend(stamp..stamp + len);
            covered_to = Some(stamp + len - 1);
        }
    }
    frames
}

/// Maximal runs of consecutive frames as `[first / fps, last / fps]`.
pub fn group_intervals(frames: &[usize], fps: f64) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for &f in frames {
        run = match run {
            Some((first, last)) if f == last + 1 => Some((first, f)),
            Some((first, last)) => {
                out.push([first as f64 / fps, last as f64 / fps]);
                Some((f, f))
            }
            None => Some((f, f)),
        };
    }
    if let Some((first, last)) = run {
        out.push([first as f64 / fps, last as f64 / fps]);
    }
    out
}

/// Drops every frame listed in the plan.
pub fn apply_cuts(stream: &VideoStream, plan: &CutPlan) -> Result<VideoStream> {
    let n = stream.len();
    if let Some(&bad) = plan.removal_frames.iter().find(|&&f| f >= n) {
        return Err(Error::IntervalOutOfRange {
            frame: bad,
            frame_count: n,
        });
    }
    let remove: BTreeSet<usize> = plan.removal_frames.iter().copied().collect();
    let kept = stream
        .frames()
        .iter()
        .enumerate()
        .filter(|(i, _)| !remove.contains(i))
        .map(|(_, f)| f.clone())
        .collect();
    VideoStream::new(stream.geometry(), stream.fps(), kept)
}

/// One analyze-and-cut pass.
#[derive(Debug, Clone, PartialEq)]
pub struct SanitizePass {
    pub report: AnalysisReport,
    /// Empty on the pass that found nothing to cut.
    pub plan: CutPlan,
}

#[derive(Debug, Clone)]
pub struct SanitizeOutcome {
    pub stream: VideoStream,
    pub passes: Vec<SanitizePass>,
}

impl SanitizeOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &AnalysisReport> {
        self.passes.iter().map(|p| &p.report)
    }

    /// Trigger count of the last analysis performed.
    pub fn last_trigger_count(&self) -> usize {
        self.passes.last().map_or(0, |p| p.report.num_triggers)
    }
}

/// Repeatedly analyzes and cuts. Stops early once a pass finds no triggers.
///
/// When the budget runs out the last report describes the stream before its
/// final cut; [`SanitizeOutcome::stream`] is always the fully cut result.
pub fn sanitize_iterative(
    stream: &VideoStream,
    acfg: &AnalysisConfig,
    scfg: &SanitizeConfig,
) -> Result<SanitizeOutcome> {
    acfg.validate()?;
    scfg.validate()?;
    let fps = stream.fps().as_f64();
    let mut current = stream.clone();
    let mut passes = Vec::new();
    for _ in 0..scfg.max_iterations {
        let started = Instant::now();
        let analysis = analyze_stream(&current, acfg)?;
        let report = AnalysisReport::new(
            &analysis,
            &SourceInfo::of_stream(&current),
            acfg,
            started.elapsed().as_millis() as u64,
        );
        if analysis.num_triggers() == 0 {
            passes.push(SanitizePass {
                report,
                plan: CutPlan::default(),
            });
            break;
        }
        let n = current.len();
        let frames = removal_windows(&analysis.harmful.rem_frm, fps, scfg)
            .into_iter()
            .filter(|&f| f < n);
        let plan = CutPlan::from_frames(frames, fps);
        let next = apply_cuts(&current, &plan)?;
        debug_assert_eq!(next.len() + plan.removal_frames.len(), current.len());
        passes.push(SanitizePass { report, plan });
        current = next;
    }
    Ok(SanitizeOutcome {
        stream: current,
        passes,
    })
}
