use sha2::{Digest, Sha256};

use crate::frameio::{FrameGeometry, FrameRate, RgbFrame, VideoStream};

/// Incremental SHA-256 over frame planes, then geometry and frame rate.
#[derive(Debug, Clone, Default)]
pub struct StreamHasher {
    inner: Sha256,
}

impl StreamHasher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update_frame(&mut self, frame: &RgbFrame) {
        for plane in frame.planes() {
            self.inner.update(plane);
        }
    }

    pub fn finish(mut self, geometry: FrameGeometry, fps: FrameRate) -> String {
        self.inner.update((geometry.width as u64).to_le_bytes());
        self.inner.update((geometry.height as u64).to_le_bytes());
        self.inner.update(fps.num.to_le_bytes());
        self.inner.update(fps.den.to_le_bytes());
        hex(&self.inner.finalize())
    }
}

pub fn stream_digest(stream: &VideoStream) -> String {
    let mut h = StreamHasher::new();
    for f in stream.frames() {
        h.update_frame(f);
    }
    h.finish(stream.geometry(), stream.fps())
}

fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes
        .iter()
        .fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}
