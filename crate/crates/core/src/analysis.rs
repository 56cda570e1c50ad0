//! End-to-end detection over a frame sequence.
//!
//! [`Analyzer`] consumes frames one at a time on the calling thread and keeps
//! only the previous luminance frame. [`analyze_stream`] processes an
//! in-memory stream in chunks with the per-frame work spread over the rayon
//! pool. Both produce identical results.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flashdetect::{
    harmful_extremes, AnalysisConfig, DeltaScanner, HarmfulExtremes, ScanResult, TrendAccumulator,
    TrendExtremes,
};
use crate::frameio::{downscale_area, downscale_area_mean, RgbFrame, VideoStream};
use crate::photometry::{lum_diff, luminance_frame, LuminanceFrame};
use crate::triggerscore::{summarize, TriggerSummary};

const CHUNK: usize = 64;

/// Everything the detector derived from one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub frame_count: usize,
    pub scans: Vec<ScanResult>,
    pub trend: TrendExtremes,
    pub harmful: HarmfulExtremes,
    pub summary: TriggerSummary,
}

impl Analysis {
    pub fn num_triggers(&self) -> usize {
        self.summary.num_triggers
    }

    fn from_scans(
        frame_count: usize,
        scans: Vec<ScanResult>,
        fps: f64,
        cfg: &AnalysisConfig,
    ) -> Result<Self> {
        let mut acc = TrendAccumulator::new();
        for s in &scans {
            acc.push(s.delta);
        }
        let trend = acc.finish(cfg.flush_trailing);
        let harmful = harmful_extremes(&trend, cfg);
        let summary = summarize(&harmful.rem_frm, &harmful.ep_frm, fps)?;
        Ok(Self {
            frame_count,
            scans,
            trend,
            harmful,
            summary,
        })
    }
}

/// Resizes (when larger than the analysis geometry) and converts one frame.
pub fn prepare_frame(
    frame: &RgbFrame,
    frame_index: usize,
    cfg: &AnalysisConfig,
) -> Result<LuminanceFrame> {
    let src = frame.geometry();
    let target = src.clamp_to(cfg.analysis_geometry);
    if src == target {
        return Ok(luminance_frame(frame, frame_index));
    }
    if cfg.quantize_downscale {
        Ok(luminance_frame(
            &downscale_area(frame, target)?,
            frame_index,
        ))
    } else {
        LuminanceFrame::from_channel_means(
            target,
            frame_index,
            &downscale_area_mean(frame, target)?,
        )
    }
}

/// Single-threaded streaming analyzer.
pub struct Analyzer {
    cfg: AnalysisConfig,
    fps: f64,
    prev: Option<LuminanceFrame>,
    frames: usize,
    scanner: DeltaScanner,
    scans: Vec<ScanResult>,
}

impl Analyzer {
    pub fn new(cfg: AnalysisConfig, fps: f64) -> Result<Self> {
        cfg.validate()?;
        if !(fps > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "fps must be positive, got {fps}"
            )));
        }
        Ok(Self {
            cfg,
            fps,
            prev: None,
            frames: 0,
            scanner: DeltaScanner::new(),
            scans: Vec::new(),
        })
    }

    pub fn push_frame(&mut self, frame: &RgbFrame) -> Result<()> {
        let cur = prepare_frame(frame, self.frames, &self.cfg)?;
        if let Some(prev) = &self.prev {
            let diff = lum_diff(prev, &cur)?;
            self.scans.push(self.scanner.scan(&diff, &self.cfg));
        }
        self.prev = Some(cur);
        self.frames += 1;
        Ok(())
    }

    pub fn frames_seen(&self) -> usize {
        self.frames
    }

    pub fn finish(self) -> Result<Analysis> {
        Analysis::from_scans(self.frames, self.scans, self.fps, &self.cfg)
    }
}

/// Analyzes an in-memory stream using the rayon thread pool.
pub fn analyze_stream(stream: &VideoStream, cfg: &AnalysisConfig) -> Result<Analysis> {
    analyze_frames(stream.frames(), stream.fps().as_f64(), cfg)
}

pub fn analyze_frames(frames: &[RgbFrame], fps: f64, cfg: &AnalysisConfig) -> Result<Analysis> {
    cfg.validate()?;
    if !(fps > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "fps must be positive, got {fps}"
        )));
    }
    let mut scans = Vec::with_capacity(frames.len().saturating_sub(1));
    let mut prev: Option<LuminanceFrame> = None;
    for (c, chunk) in frames.chunks(CHUNK).enumerate() {
        let base = c * CHUNK;
        let lums = chunk
            .par_iter()
            .enumerate()
            .map(|(i, f)| prepare_frame(f, base + i, cfg))
            .collect::<Result<Vec<_>>>()?;

        let mut pairs: Vec<(&LuminanceFrame, &LuminanceFrame)> = Vec::with_capacity(lums.len());
        if let Some(p) = &prev {
            pairs.push((p, &lums[0]));
        }
        pairs.extend(lums.windows(2).map(|w| (&w[0], &w[1])));
        let chunk_scans = pairs
            .par_iter()
            .map_init(DeltaScanner::new, |scanner, (a, b)| {
                lum_diff(a, b).map(|d| scanner.scan(&d, cfg))
            })
            .collect::<Result<Vec<_>>>()?;
        scans.extend(chunk_scans);
        prev = lums.into_iter().last();
    }
    Analysis::from_scans(frames.len(), scans, fps, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frameio::{FrameGeometry, FrameRate};

    fn strobe(n: usize, g: FrameGeometry) -> VideoStream {
        let frames = (0..n)
            .map(|k| RgbFrame::filled(g, if k % 2 == 1 { [255; 3] } else { [0; 3] }))
            .collect();
        VideoStream::new(g, FrameRate::integer(30).unwrap(), frames).unwrap()
    }

    #[test]
    fn full_screen_strobe_counts_one() {
        let s = strobe(60, FrameGeometry::new(16, 12).unwrap());
        let a = analyze_stream(&s, &AnalysisConfig::default()).unwrap();
        assert_eq!(a.scans.len(), 59);
        assert_eq!(a.harmful.ep_frm, vec![1; 58]);
        assert_eq!(a.num_triggers(), 1);
    }

    #[test]
    fn streaming_matches_batch() {
        let s = strobe(150, FrameGeometry::new(8, 8).unwrap());
        let cfg = AnalysisConfig::default();
        let mut an = Analyzer::new(cfg, 30.0).unwrap();
        for f in s.frames() {
            an.push_frame(f).unwrap();
        }
        assert_eq!(an.finish().unwrap(), analyze_stream(&s, &cfg).unwrap());
    }

    #[test]
    fn short_streams_are_clean() {
        let g = FrameGeometry::new(4, 4).unwrap();
        for n in 0..2 {
            let a = analyze_stream(&strobe(n, g), &AnalysisConfig::default()).unwrap();
            assert_eq!(a.frame_count, n);
            assert_eq!(a.num_triggers(), 0);
            assert!(a.trend.fin.is_empty());
        }
    }

    #[test]
    fn large_frames_are_downscaled() {
        let big = FrameGeometry::new(640, 480).unwrap();
        let f = RgbFrame::filled(big, [10, 20, 30]);
        let cfg = AnalysisConfig::default();
        let l = prepare_frame(&f, 0, &cfg).unwrap();
        assert_eq!(l.geometry(), FrameGeometry::ANALYSIS);
        let unq = prepare_frame(
            &f,
            0,
            &AnalysisConfig {
                quantize_downscale: false,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(unq.values(), l.values());

        // smaller than target in one dimension only
        let wide = RgbFrame::filled(FrameGeometry::new(400, 100).unwrap(), [0; 3]);
        assert_eq!(
            prepare_frame(&wide, 0, &cfg).unwrap().geometry(),
            FrameGeometry::new(320, 100).unwrap()
        );
    }
}
