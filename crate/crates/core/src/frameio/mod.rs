//! Frame and stream types plus the uncompressed container formats.
//!
//! Three ingestion formats are supported: YUV4MPEG2 with 4:4:4 chroma,
//! numbered binary PPM sequences and headerless interleaved RGB24. Frames are
//! stored planar (R, G, B) at 8 bits per sample.

mod downscale;
mod ppm;
mod raw;
mod y4m;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use downscale::{downscale_area, downscale_area_mean};
pub use ppm::{read_ppm_sequence, write_ppm_sequence, StreamMeta, META_FILE};
pub use raw::{write_raw_rgb24, RawRgbReader};
pub use y4m::{parse_y4m, rgb_to_ycbcr, write_y4m, ycbcr_to_rgb, Y4mReader};

/// Width and height of a frame in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameGeometry {
    pub width: usize,
    pub height: usize,
}

impl FrameGeometry {
    /// The analysis resolution the detector resizes to.
    pub const ANALYSIS: FrameGeometry = FrameGeometry {
        width: 320,
        height: 240,
    };

    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig(format!(
                "frame geometry must be at least 1x1, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    /// Total screen area in pixels.
    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Per-dimension minimum, used to avoid upscaling small inputs.
    pub fn clamp_to(&self, limit: FrameGeometry) -> FrameGeometry {
        FrameGeometry {
            width: self.width.min(limit.width),
            height: self.height.min(limit.height),
        }
    }
}

impl fmt::Display for FrameGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for FrameGeometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("geometry must look like 320x240, got `{s}`"));
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let w = w.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        FrameGeometry::new(w, h)
    }
}

/// Frames per second as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameRate {
    pub num: u32,
    pub den: u32,
}

impl FrameRate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidConfig(format!(
                "frame rate terms must be >= 1, got {num}/{den}"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn integer(fps: u32) -> Result<Self> {
        Self::new(fps, 1)
    }

    #[inline]
    pub fn as_f64(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl fmt::Display for FrameRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for FrameRate {
    type Err = Error;

    /// Accepts `30`, `30/1`, `30:1` or `30000/1001`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidConfig(format!(
                "frame rate must look like 30 or 30000/1001, got `{s}`"
            ))
        };
        match s.split_once(['/', ':']) {
            Some((n, d)) => FrameRate::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => FrameRate::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}

/// An 8-bit RGB picture stored as three row-major planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbFrame {
    geometry: FrameGeometry,
    r: Vec<u8>,
    g: Vec<u8>,
    b: Vec<u8>,
}

impl RgbFrame {
    pub fn from_planes(
        geometry: FrameGeometry,
        r: Vec<u8>,
        g: Vec<u8>,
        b: Vec<u8>,
    ) -> Result<Self> {
        let n = geometry.pixel_count();
        for plane in [&r, &g, &b] {
            if plane.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "plane of {} samples does not match {geometry}",
                    plane.len()
                )));
            }
        }
        Ok(Self { geometry, r, g, b })
    }

    /// Builds a frame from packed `RGBRGB...` bytes.
    pub fn from_interleaved(geometry: FrameGeometry, rgb: &[u8]) -> Result<Self> {
        let n = geometry.pixel_count();
        if rgb.len() != 3 * n {
            return Err(Error::InvalidConfig(format!(
                "{} interleaved bytes do not match {geometry}",
                rgb.len()
            )));
        }
        let mut r = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for px in rgb.chunks_exact(3) {
            r.push(px[0]);
            g.push(px[1]);
            b.push(px[2]);
        }
        Ok(Self { geometry, r, g, b })
    }

    /// A frame with every pixel set to the same color.
    pub fn filled(geometry: FrameGeometry, rgb: [u8; 3]) -> Self {
        let n = geometry.pixel_count();
        Self {
            geometry,
            r: vec![rgb[0]; n],
            g: vec![rgb[1]; n],
            b: vec![rgb[2]; n],
        }
    }

    /// A frame with R = G = B taken from `gray`.
    pub fn gray(geometry: FrameGeometry, gray: Vec<u8>) -> Result<Self> {
        Self::from_planes(geometry, gray.clone(), gray.clone(), gray)
    }

    #[inline]
    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    #[inline]
    pub fn planes(&self) -> [&[u8]; 3] {
        [&self.r, &self.g, &self.b]
    }

    pub fn planes_mut(&mut self) -> [&mut [u8]; 3] {
        [&mut self.r, &mut self.g, &mut self.b]
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = y * self.geometry.width + x;
        [self.r[i], self.g[i], self.b[i]]
    }

    pub fn to_interleaved(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(3 * self.r.len());
        for i in 0..self.r.len() {
            out.extend_from_slice(&[self.r[i], self.g[i], self.b[i]]);
        }
        out
    }
}

/// Ordered frames sharing one geometry and frame rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoStream {
    geometry: FrameGeometry,
    fps: FrameRate,
    frames: Vec<RgbFrame>,
}

impl VideoStream {
    pub fn new(geometry: FrameGeometry, fps: FrameRate, frames: Vec<RgbFrame>) -> Result<Self> {
        if let Some(bad) = frames.iter().find(|f| f.geometry != geometry) {
            return Err(Error::GeometryMismatch {
                expected: geometry,
                actual: bad.geometry,
            });
        }
        Ok(Self {
            geometry,
            fps,
            frames,
        })
    }

    #[inline]
    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    #[inline]
    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    #[inline]
    pub fn frames(&self) -> &[RgbFrame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<RgbFrame> {
        self.frames
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// On-disk representations understood by [`read_video`] and [`write_video`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VideoFormat {
    Y4m,
    PpmSequence,
    RawRgb24,
}

impl FromStr for VideoFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y4m" => Ok(VideoFormat::Y4m),
            "ppm" | "ppm_sequence" | "ppm-sequence" => Ok(VideoFormat::PpmSequence),
            "raw" | "rgb24" | "raw_rgb24" => Ok(VideoFormat::RawRgb24),
            other => Err(Error::InvalidConfig(format!(
                "unknown video format `{other}`"
            ))),
        }
    }
}

impl VideoFormat {
    /// Guesses the format from a path: directories are PPM sequences,
    /// `.y4m` files are YUV4MPEG2 and `.rgb`/`.raw` files are RGB24.
    pub fn detect(path: &Path) -> Option<Self> {
        if path.is_dir() {
            return Some(VideoFormat::PpmSequence);
        }
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "y4m" => Some(VideoFormat::Y4m),
            "rgb" | "raw" | "rgb24" => Some(VideoFormat::RawRgb24),
            _ => None,
        }
    }
}

/// Reads a whole stream from `path`. Raw RGB24 carries no header, so it needs
/// both `geometry` and `fps`; PPM sequences take `fps` as an override of their
/// sidecar metadata; Y4M ignores both.
pub fn read_video(
    path: &Path,
    format: VideoFormat,
    geometry: Option<FrameGeometry>,
    fps: Option<FrameRate>,
) -> Result<VideoStream> {
    match format {
        VideoFormat::PpmSequence => read_ppm_sequence(path, fps),
        VideoFormat::Y4m => parse_y4m(std::io::BufReader::new(std::fs::File::open(path)?)),
        VideoFormat::RawRgb24 => {
            let geometry = geometry.ok_or_else(|| {
                Error::InvalidConfig("raw RGB24 input needs a frame geometry".into())
            })?;
            let fps = fps.ok_or(Error::MissingFrameRate("raw RGB24"))?;
            let file = std::io::BufReader::new(std::fs::File::open(path)?);
            RawRgbReader::new(file, geometry, fps).read_stream()
        }
    }
}

/// Writes `stream` to `path` in the requested format and returns the number
/// of bytes written. PPM sequences treat `path` as a directory.
pub fn write_video(stream: &VideoStream, format: VideoFormat, path: &Path) -> Result<u64> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    match format {
        VideoFormat::PpmSequence => write_ppm_sequence(stream, path),
        VideoFormat::Y4m => {
            let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
            let n = write_y4m(stream, &mut out)?;
            std::io::Write::flush(&mut out)?;
            Ok(n)
        }
        VideoFormat::RawRgb24 => {
            let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
            let n = write_raw_rgb24(stream, &mut out)?;
            std::io::Write::flush(&mut out)?;
            Ok(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_geometry_and_rate() {
        assert_eq!(
            "320x240".parse::<FrameGeometry>().unwrap(),
            FrameGeometry::ANALYSIS
        );
        assert!("0x240".parse::<FrameGeometry>().is_err());
        assert!("320".parse::<FrameGeometry>().is_err());
        assert_eq!(
            "30".parse::<FrameRate>().unwrap(),
            FrameRate::new(30, 1).unwrap()
        );
        assert_eq!("30000/1001".parse::<FrameRate>().unwrap().den, 1001);
        assert_eq!("25:1".parse::<FrameRate>().unwrap().num, 25);
        assert!("0/1".parse::<FrameRate>().is_err());
    }

    #[test]
    fn stream_rejects_mixed_geometry() {
        let a = RgbFrame::filled(FrameGeometry::new(4, 4).unwrap(), [0; 3]);
        let b = RgbFrame::filled(FrameGeometry::new(8, 8).unwrap(), [0; 3]);
        let err = VideoStream::new(a.geometry(), FrameRate::integer(30).unwrap(), vec![a, b]);
        assert!(matches!(err, Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn interleaved_round_trip() {
        let g = FrameGeometry::new(2, 1).unwrap();
        let f = RgbFrame::from_interleaved(g, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(f.pixel(1, 0), [4, 5, 6]);
        assert_eq!(f.to_interleaved(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn write_rejects_empty_stream() {
        let dir = tempfile::tempdir().unwrap();
        let s = VideoStream::new(
            FrameGeometry::new(2, 2).unwrap(),
            FrameRate::integer(30).unwrap(),
            vec![],
        )
        .unwrap();
        let err = write_video(&s, VideoFormat::PpmSequence, dir.path());
        assert!(matches!(err, Err(Error::EmptyStream)));
    }
}
