//! Flash detection: per-frame signed luminance delta, trend accumulation into
//! local extremes, and thresholding of those extremes.
//!
//! Each difference frame is split into its positive and negative parts. The
//! largest `Q = ceil(pixels * area_fraction)` entries of each part are
//! averaged, and the larger average (signed) is the frame delta. Consecutive
//! deltas of the same sign are summed; when the sign flips, the finished sum is
//! a local extreme. An extreme is harmful when its magnitude reaches the flash
//! threshold.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frameio::FrameGeometry;
use crate::photometry::DiffFrame;

/// How the top-`Q` averages treat frames where fewer than `Q` pixels moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Zero-padded mean of the top `Q` entries: small flashes are diluted.
    #[default]
    Reference,
    /// The average is zero unless at least `Q` pixels changed in that direction.
    Strict,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(ScanMode::Reference),
            "strict" => Ok(ScanMode::Strict),
            other => Err(Error::InvalidConfig(format!("unknown scan mode `{other}`"))),
        }
    }
}

/// Every tunable of the detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Minimum fraction of the screen a flash must cover.
    pub area_fraction: f64,
    /// Harmful extreme threshold in cd/m².
    pub flash_threshold: f64,
    pub scan_mode: ScanMode,
    /// Only count transitions whose darker frame averages below `dark_gate_limit`.
    pub dark_gate_enabled: bool,
    pub dark_gate_limit: f64,
    /// Emit the run still open at end of stream as an extreme.
    pub flush_trailing: bool,
    /// Frames larger than this are area-downscaled before analysis.
    pub analysis_geometry: FrameGeometry,
    /// Round downscaled samples to 8 bits before computing luminance.
    pub quantize_downscale: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            area_fraction: 0.25,
            flash_threshold: 20.0,
            scan_mode: ScanMode::Reference,
            dark_gate_enabled: false,
            dark_gate_limit: 160.0,
            flush_trailing: false,
            analysis_geometry: FrameGeometry::ANALYSIS,
            quantize_downscale: true,
        }
    }
}

impl AnalysisConfig {
    pub fn strict() -> Self {
        Self {
            scan_mode: ScanMode::Strict,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area_fraction > 0.0 && self.area_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "area_fraction must be in (0, 1], got {}",
                self.area_fraction
            )));
        }
        if !(self.flash_threshold > 0.0 && self.flash_threshold.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "flash_threshold must be positive, got {}",
                self.flash_threshold
            )));
        }
        if !(self.dark_gate_limit > 0.0 && self.dark_gate_limit.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dark_gate_limit must be positive, got {}",
                self.dark_gate_limit
            )));
        }
        Ok(())
    }
}

/// Minimum pixel count `Q` for a flash over `pixel_count` pixels.
///
/// Products within 1e-9 (relative) of an integer snap to it so that e.g.
/// `3000 * 0.2` gives 600 rather than 601.
pub fn required_pixels(pixel_count: usize, area_fraction: f64) -> usize {
    let exact = pixel_count as f64 * area_fraction;
    let nearest = exact.round();
    let q = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    (q as usize).clamp(1, pixel_count.max(1))
}

/// Outcome of scanning one difference frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub frame_index: usize,
    pub pos_avg: f64,
    pub neg_avg: f64,
    /// Strictly positive entries among the top `Q` of each scan set.
    pub scanned_count_pos: usize,
    pub scanned_count_neg: usize,
    pub delta: f64,
}

/// Full positive and negative scan sets, each sorted descending, with zeros
/// standing in for pixels that moved the other way.
pub fn scan_sets(diff: &DiffFrame) -> (Vec<f64>, Vec<f64>) {
    let mut pos: Vec<f64> = diff
        .values()
        .iter()
        .map(|&v| if v > 0.0 { v } else { 0.0 })
        .collect();
    let mut neg: Vec<f64> = diff
        .values()
        .iter()
        .map(|&v| if v < 0.0 { -v } else { 0.0 })
        .collect();
    pos.sort_unstable_by(|a, b| b.total_cmp(a));
    neg.sort_unstable_by(|a, b| b.total_cmp(a));
    (pos, neg)
}

#[inline]
fn descending(a: &f64, b: &f64) -> Ordering {
    b.total_cmp(a)
}

/// Mean of the `q` largest entries of `values` (all strictly positive),
/// padded with zeros when fewer than `q` exist. Entries are summed in
/// descending order. Returns `(mean, entries used)`.
fn top_mean(values: &mut [f64], q: usize) -> (f64, usize) {
    let used = values.len().min(q);
    if values.len() > q {
        values.select_nth_unstable_by(q - 1, descending);
    }
    let top = &mut values[..used];
    top.sort_unstable_by(descending);
    let sum: f64 = top.iter().sum();
    (sum / q as f64, used)
}

/// Reusable scratch buffers for [`frame_delta`].
#[derive(Debug, Default)]
pub struct DeltaScanner {
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl DeltaScanner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scan(&mut self, diff: &DiffFrame, cfg: &AnalysisConfig) -> ScanResult {
        self.pos.clear();
        self.neg.clear();
        for &v in diff.values() {
            if v > 0.0 {
                self.pos.push(v);
            } else if v < 0.0 {
                self.neg.push(-v);
            }
        }
        let q = required_pixels(diff.geometry().pixel_count(), cfg.area_fraction);
        let (mut pos_avg, pos_used) = top_mean(&mut self.pos, q);
        let (mut neg_avg, neg_used) = top_mean(&mut self.neg, q);
        if cfg.scan_mode == ScanMode::Strict {
            if pos_used < q {
                pos_avg = 0.0;
            }
            if neg_used < q {
                neg_avg = 0.0;
            }
        }

        // exact ties go to the negative branch
        let mut delta = if pos_avg > neg_avg { pos_avg } else { -neg_avg };
        if cfg.dark_gate_enabled && !(diff.darker_mean() < cfg.dark_gate_limit) {
            delta = 0.0;
        }
        if delta == 0.0 {
            delta = 0.0;
        }

        ScanResult {
            frame_index: diff.frame_index(),
            pos_avg,
            neg_avg,
            scanned_count_pos: pos_used,
            scanned_count_neg: neg_used,
            delta,
        }
    }
}

/// Signed luminance delta of one difference frame.
pub fn frame_delta(diff: &DiffFrame, cfg: &AnalysisConfig) -> ScanResult {
    DeltaScanner::new().scan(diff, cfg)
}

/// Local extremes of the accumulated frame deltas.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrendExtremes {
    /// Sum of each finished same-sign run.
    pub fin: Vec<f64>,
    /// Frame index at which each run ended.
    pub fin_frames: Vec<usize>,
}

/// Sign-run accumulator fed one frame delta at a time. Zero counts as
/// negative.
#[derive(Debug, Clone, Default)]
pub struct TrendAccumulator {
    cum: f64,
    run_end: usize,
    seen: usize,
    positive: bool,
    out: TrendExtremes,
}

impl TrendAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Feeds the delta of the next frame. Returns the extreme closed by a
    /// sign flip, if any.
    pub fn push(&mut self, delta: f64) -> Option<(f64, usize)> {
        self.seen += 1;
        let positive = delta > 0.0;
        if self.seen == 1 {
            self.cum = delta;
            self.run_end = 1;
            self.positive = positive;
            return None;
        }
        if positive == self.positive {
            self.cum += delta;
            self.run_end += 1;
            return None;
        }
        let closed = (self.cum, self.run_end);
        self.out.fin.push(self.cum);
        self.out.fin_frames.push(self.run_end);
        self.cum = delta;
        self.run_end = self.seen;
        self.positive = positive;
        Some(closed)
    }

    pub fn len(&self) -> usize {
        self.seen
    }

    pub fn is_empty(&self) -> bool {
        self.seen == 0
    }

    /// Ends the stream. The open run is dropped unless `flush_trailing`.
    pub fn finish(mut self, flush_trailing: bool) -> TrendExtremes {
        if flush_trailing && self.seen > 0 {
            self.out.fin.push(self.cum);
            self.out.fin_frames.push(self.run_end);
        }
        self.out
    }
}

/// Accumulates ordered frame deltas (frame indices 1, 2, ...) into extremes.
pub fn accumulate_trend(deltas: &[ScanResult], flush_trailing: bool) -> Result<TrendExtremes> {
    if deltas.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut acc = TrendAccumulator::new();
    for (i, d) in deltas.iter().enumerate() {
        if d.frame_index != i + 1 {
            return Err(Error::NonConsecutiveFrames {
                prev: i,
                cur: d.frame_index,
            });
        }
        acc.push(d.delta);
    }
    Ok(acc.finish(flush_trailing))
}

/// Harmful extremes as absolute frame stamps and gaps between them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmfulExtremes {
    /// Frames since the previous harmful extreme (the first counts from 0).
    pub ep_frm: Vec<usize>,
    /// Frame stamp of each harmful extreme.
    pub rem_frm: Vec<usize>,
    /// Signed accumulated change of each harmful extreme, cd/m².
    pub magnitudes: Vec<f64>,
}

pub fn harmful_extremes(trend: &TrendExtremes, cfg: &AnalysisConfig) -> HarmfulExtremes {
    let mut out = HarmfulExtremes::default();
    let mut prev = 0;
    for (&value, &frame) in trend.fin.iter().zip(&trend.fin_frames) {
        if value.abs() >= cfg.flash_threshold {
            out.ep_frm.push(frame - prev);
            out.rem_frm.push(frame);
            out.magnitudes.push(value);
            prev = frame;
        }
    }
    out
}
