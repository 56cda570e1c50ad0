//! JSON reports and the on-disk report cache.
//!
//! Reports are written compactly with keys in declaration order and every real
//! number printed with exactly six decimals. Reals are rounded to six decimals
//! when the report is built, so a report parses back to an equal value.

mod cache;
mod digest;

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::analysis::Analysis;
use crate::error::Result;
use crate::flashdetect::AnalysisConfig;
use crate::frameio::{FrameGeometry, FrameRate, VideoStream};

pub use cache::{ReportCache, CACHE_DIR_ENV};
pub use digest::{stream_digest, StreamHasher};

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to the six decimals used in serialized output.
#[inline]
pub fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// The configuration as it appears in a report.
pub fn config_echo(cfg: &AnalysisConfig) -> AnalysisConfig {
    AnalysisConfig {
        area_fraction: round6(cfg.area_fraction),
        flash_threshold: round6(cfg.flash_threshold),
        dark_gate_limit: round6(cfg.dark_gate_limit),
        ..*cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extreme {
    pub frame: usize,
    /// Absolute accumulated luminance change.
    pub magnitude_cd_m2: f64,
}

/// Identity of the analyzed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceInfo {
    pub digest: String,
    pub geometry: FrameGeometry,
    pub fps: FrameRate,
}

impl SourceInfo {
    pub fn of_stream(stream: &VideoStream) -> Self {
        Self {
            digest: stream_digest(stream),
            geometry: stream.geometry(),
            fps: stream.fps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub source_digest: String,
    pub geometry: FrameGeometry,
    pub fps: FrameRate,
    pub frame_count: usize,
    pub config: AnalysisConfig,
    pub num_triggers: usize,
    pub harmful_frames: Vec<usize>,
    pub timestamps_s: Vec<f64>,
    pub extremes: Vec<Extreme>,
    pub runtime_ms: u64,
}

impl AnalysisReport {
    pub fn new(
        analysis: &Analysis,
        source: &SourceInfo,
        cfg: &AnalysisConfig,
        runtime_ms: u64,
    ) -> Self {
        let extremes = analysis
            .harmful
            .rem_frm
            .iter()
            .zip(&analysis.harmful.magnitudes)
            .map(|(&frame, &m)| Extreme {
                frame,
                magnitude_cd_m2: round6(m.abs()),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            source_digest: source.digest.clone(),
            geometry: source.geometry,
            fps: source.fps,
            frame_count: analysis.frame_count,
            config: config_echo(cfg),
            num_triggers: analysis.summary.num_triggers,
            harmful_frames: analysis.summary.harmful_frames.clone(),
            timestamps_s: analysis
                .summary
                .timestamps_s
                .iter()
                .map(|&t| round6(t))
                .collect(),
            extremes,
            runtime_ms,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SixDecimals);
        self.serialize(&mut ser)
            .expect("report serialization is infallible");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

/// Compact JSON with reals printed as `{:.6}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SixDecimals;

impl Formatter for SixDecimals {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.6}")
    }
}

/// Serializes any value with [`SixDecimals`].
pub fn to_fixed_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SixDecimals);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze_stream;
    use crate::frameio::RgbFrame;
    use proptest::prelude::*;

    fn strobe_report() -> AnalysisReport {
        let g = FrameGeometry::new(8, 6).unwrap();
        let frames = (0..60)
            .map(|k| RgbFrame::filled(g, if k % 2 == 1 { [255; 3] } else { [0; 3] }))
            .collect();
        let s = VideoStream::new(g, FrameRate::integer(30).unwrap(), frames).unwrap();
        let cfg = AnalysisConfig::default();
        AnalysisReport::new(
            &analyze_stream(&s, &cfg).unwrap(),
            &SourceInfo::of_stream(&s),
            &cfg,
            5,
        )
    }

    #[test]
    fn empty_report_layout() {
        let g = FrameGeometry::new(2, 2).unwrap();
        let s = VideoStream::new(
            g,
            FrameRate::integer(30).unwrap(),
            vec![RgbFrame::filled(g, [9; 3]); 3],
        )
        .unwrap();
        let cfg = AnalysisConfig::default();
        let r = AnalysisReport::new(
            &analyze_stream(&s, &cfg).unwrap(),
            &SourceInfo::of_stream(&s),
            &cfg,
            0,
        );
        let text = String::from_utf8(r.to_json()).unwrap();
        let expected = format!(
            concat!(
                r#"{{"schema_version":1,"source_digest":"{}","geometry":{{"width":2,"height":2}},"#,
                r#""fps":{{"num":30,"den":1}},"frame_count":3,"config":{{"area_fraction":0.250000,"#,
                r#""flash_threshold":20.000000,"scan_mode":"reference","dark_gate_enabled":false,"#,
                r#""dark_gate_limit":160.000000,"flush_trailing":false,"#,
                r#""analysis_geometry":{{"width":320,"height":240}},"quantize_downscale":true}},"#,
                r#""num_triggers":0,"harmful_frames":[],"timestamps_s":[],"extremes":[],"runtime_ms":0}}"#,
                "\n"
            ),
            r.source_digest
        );
        assert_eq!(text, expected);
    }

    #[test]
    fn strobe_report_round_trips() {
        let r = strobe_report();
        assert_eq!(r.num_triggers, 1);
        assert_eq!(r.harmful_frames, (1..=58).collect::<Vec<_>>());
        assert!(r
            .extremes
            .iter()
            .all(|e| e.magnitude_cd_m2 >= r.config.flash_threshold));
        let json = r.to_json();
        assert!(String::from_utf8_lossy(&json).contains("\"timestamps_s\":[0.033333,0.066667,"));
        assert_eq!(AnalysisReport::from_json(&json).unwrap(), r);
    }

    proptest! {
        #[test]
        fn rounded_reals_survive_serialization(
            frames in proptest::collection::vec(0usize..1_000_000, 0..20),
            fps in 1.0f64..240.0,
            mags in proptest::collection::vec(20.0f64..400.0, 20),
            k in 0.01f64..=1.0,
        ) {
            let cfg = AnalysisConfig { area_fraction: k, ..Default::default() };
            let r = AnalysisReport {
                schema_version: SCHEMA_VERSION,
                source_digest: "ab".repeat(32),
                geometry: FrameGeometry::ANALYSIS,
                fps: FrameRate::integer(30).unwrap(),
                frame_count: 10,
                config: config_echo(&cfg),
                num_triggers: frames.len() / 5,
                harmful_frames: frames.clone(),
                timestamps_s: frames.iter().map(|&f| round6(f as f64 / fps)).collect(),
                extremes: frames.iter().zip(&mags).map(|(&frame, &m)| Extreme { frame, magnitude_cd_m2: round6(m) }).collect(),
                runtime_ms: 1,
            };
            prop_assert_eq!(AnalysisReport::from_json(&r.to_json()).unwrap(), r);
        }
    }
}
