//! Headerless interleaved RGB24; geometry and frame rate come from the caller.

use std::io::{Read, Write};

use super::{FrameGeometry, FrameRate, RgbFrame, VideoStream};
use crate::error::{Error, Result};

pub struct RawRgbReader<R> {
    inner: R,
    geometry: FrameGeometry,
    fps: FrameRate,
    buf: Vec<u8>,
    frames_read: usize,
}

impl<R: Read> RawRgbReader<R> {
    pub fn new(inner: R, geometry: FrameGeometry, fps: FrameRate) -> Self {
        Self {
            inner,
            geometry,
            fps,
            buf: vec![0; 3 * geometry.pixel_count()],
            frames_read: 0,
        }
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    pub fn next_frame(&mut self) -> Result<Option<RgbFrame>> {
        let mut filled = 0;
        while filled < self.buf.len() {
            match self.inner.read(&mut self.buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        if filled == 0 {
            return Ok(None);
        }
        if filled < self.buf.len() {
            return Err(Error::TruncatedFrame {
                index: self.frames_read,
                expected: self.buf.len(),
                actual: filled,
            });
        }
        self.frames_read += 1;
        RgbFrame::from_interleaved(self.geometry, &self.buf).map(Some)
    }

    pub fn read_stream(mut self) -> Result<VideoStream> {
        let mut frames = Vec::new();
        while let Some(f) = self.next_frame()? {
            frames.push(f);
        }
        VideoStream::new(self.geometry, self.fps, frames)
    }
}

impl<R: Read> Iterator for RawRgbReader<R> {
    type Item = Result<RgbFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame().transpose()
    }
}

pub fn write_raw_rgb24<W: Write>(stream: &VideoStream, out: &mut W) -> Result<u64> {
    let mut written = 0u64;
    for frame in stream.frames() {
        let bytes = frame.to_interleaved();
        out.write_all(&bytes)?;
        written += bytes.len() as u64;
    }
    Ok(written)
}
