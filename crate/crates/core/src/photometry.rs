//! RGB to display luminance and frame-to-frame luminance differences.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frameio::{FrameGeometry, RgbFrame};

const SCALE: f64 = 413.435;
const GAIN: f64 = 0.002745;
const OFFSET: f64 = 0.0189623;
const GAMMA: f64 = 2.2;

/// Number of distinct `R+G+B` sums for 8-bit channels.
pub const CHANNEL_SUM_LEVELS: usize = 766;

/// Luminance in cd/m² of a pixel whose channel average is `channel_mean`
/// (0..=255).
#[inline]
pub fn luminance(channel_mean: f64) -> f64 {
    SCALE * (GAIN * channel_mean + OFFSET).powf(GAMMA)
}

/// Luminance indexed by `R+G+B`. Entries are bit-identical to
/// `luminance(sum as f64 / 3.0)`.
pub fn luminance_table() -> &'static [f64; CHANNEL_SUM_LEVELS] {
    static TABLE: OnceLock<[f64; CHANNEL_SUM_LEVELS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; CHANNEL_SUM_LEVELS];
        for (sum, v) in t.iter_mut().enumerate() {
            *v = luminance(sum as f64 / 3.0);
        }
        t
    })
}

/// Per-pixel luminance of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceFrame {
    geometry: FrameGeometry,
    frame_index: usize,
    values: Vec<f64>,
    mean: f64,
}

impl LuminanceFrame {
    /// Builds a frame from per-pixel channel averages, evaluating the
    /// luminance curve directly (no table).
    pub fn from_channel_means(
        geometry: FrameGeometry,
        frame_index: usize,
        means: &[f64],
    ) -> Result<Self> {
        if means.len() != geometry.pixel_count() {
            return Err(Error::InvalidConfig(format!(
                "{} channel means do not match {geometry}",
                means.len()
            )));
        }
        Ok(Self::from_values(
            geometry,
            frame_index,
            means.iter().map(|&m| luminance(m)).collect(),
        ))
    }

    fn from_values(geometry: FrameGeometry, frame_index: usize, values: Vec<f64>) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Self {
            geometry,
            frame_index,
            values,
            mean,
        }
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mean luminance over the frame.
    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// Signed per-pixel luminance change from frame `frame_index - 1` to
/// `frame_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffFrame {
    geometry: FrameGeometry,
    frame_index: usize,
    values: Vec<f64>,
    darker_mean: f64,
}

impl DiffFrame {
    /// Wraps precomputed differences. `darker_mean` is the mean luminance of
    /// the darker of the two source frames.
    pub fn new(
        geometry: FrameGeometry,
        frame_index: usize,
        values: Vec<f64>,
        darker_mean: f64,
    ) -> Result<Self> {
        if values.len() != geometry.pixel_count() {
            return Err(Error::InvalidConfig(format!(
                "{} differences do not match {geometry}",
                values.len()
            )));
        }
        Ok(Self {
            geometry,
            frame_index,
            values,
            darker_mean,
        })
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn darker_mean(&self) -> f64 {
        self.darker_mean
    }
}

/// Luminance of every pixel via the 766-entry table.
pub fn luminance_frame(frame: &RgbFrame, frame_index: usize) -> LuminanceFrame {
    let table = luminance_table();
    let [r, g, b] = frame.planes();
    let values = r
        .iter()
        .zip(g)
        .zip(b)
        .map(|((&r, &g), &b)| table[usize::from(r) + usize::from(g) + usize::from(b)])
        .collect();
    LuminanceFrame::from_values(frame.geometry(), frame_index, values)
}

pub fn lum_diff(prev: &LuminanceFrame, cur: &LuminanceFrame) -> Result<DiffFrame> {
    if prev.geometry != cur.geometry {
        return Err(Error::GeometryMismatch {
            expected: prev.geometry,
            actual: cur.geometry,
        });
    }
    if cur.frame_index != prev.frame_index + 1 {
        return Err(Error::NonConsecutiveFrames {
            prev: prev.frame_index,
            cur: cur.frame_index,
        });
    }
    let values = cur
        .values
        .iter()
        .zip(&prev.values)
        .map(|(c, p)| c - p)
        .collect();
    Ok(DiffFrame {
        geometry: cur.geometry,
        frame_index: cur.frame_index,
        values,
        darker_mean: prev.mean.min(cur.mean),
    })
}
