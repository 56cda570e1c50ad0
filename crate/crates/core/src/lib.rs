//! Photosensitive flash detection for uncompressed video.
//!
//! Frames are converted to display luminance, differenced, and reduced to a
//! signed per-frame delta over the brightest-changing quarter of the screen.
//! Same-sign deltas accumulate into local extremes; extremes of 20 cd/m² or
//! more are harmful, and more than three of them within about a second count
//! as a possible trigger. A sanitizer cuts fixed windows after each harmful
//! frame and re-analyzes until the video is clean.
//!
//! ```
//! use flashguard::prelude::*;
//!
//! let spec = StrobeSpec::full_screen(
//!     FrameGeometry::new(64, 48)?,
//!     FrameRate::integer(30)?,
//!     60,
//! );
//! let video = gen_strobe(&spec)?;
//! let analysis = analyze_stream(&video, &AnalysisConfig::default())?;
//! assert_eq!(analysis.num_triggers(), 1);
//! # Ok::<(), flashguard::Error>(())
//! ```

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod flashdetect;
pub mod frameio;
pub mod photometry;
pub mod reporting;
pub mod sanitizer;
pub mod synthgen;
pub mod triggerscore;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{analyze_frames, analyze_stream, Analysis, Analyzer};
    pub use crate::error::{Error, Result};
    pub use crate::flashdetect::{AnalysisConfig, ScanMode};
    pub use crate::frameio::{FrameGeometry, FrameRate, RgbFrame, VideoFormat, VideoStream};
    pub use crate::reporting::{AnalysisReport, ReportCache, SourceInfo};
    pub use crate::sanitizer::{sanitize_iterative, CutPlan, SanitizeConfig};
    pub use crate::synthgen::{expected_triggers, gen_strobe, StrobeSpec};
    pub use crate::triggerscore::TriggerSummary;
}
