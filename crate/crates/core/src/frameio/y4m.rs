//! YUV4MPEG2 reader and writer, 4:4:4 planar only.
//!
//! Color conversion uses the BT.601 full-range matrix. The writer searches
//! near the rounded YCbCr triple for an exact preimage, so any RGB sample
//! produced by [`ycbcr_to_rgb`] survives a write/read cycle. Arbitrary RGB
//! (e.g. from PPM input) may shift by a code value.

use std::io::{BufRead, BufReader, Read, Write};

use super::{FrameGeometry, FrameRate, RgbFrame, VideoStream};
use crate::error::{Error, Result};

const SIGNATURE: &str = "YUV4MPEG2";
const FRAME_MARKER: &[u8] = b"FRAME";
const MAX_HEADER_LEN: usize = 4096;

#[inline]
fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// BT.601 full-range YCbCr to RGB, rounded to nearest and clamped.
#[inline]
pub fn ycbcr_to_rgb(y: u8, cb: u8, cr: u8) -> [u8; 3] {
    let y = f64::from(y);
    let cb = f64::from(cb) - 128.0;
    let cr = f64::from(cr) - 128.0;
    [
        clamp_u8(y + 1.402 * cr),
        clamp_u8(y - 0.344_136 * cb - 0.714_136 * cr),
        clamp_u8(y + 1.772 * cb),
    ]
}

fn rgb_to_ycbcr_rounded(rgb: [u8; 3]) -> [u8; 3] {
    let [r, g, b] = rgb.map(f64::from);
    [
        clamp_u8(0.299 * r + 0.587 * g + 0.114 * b),
        clamp_u8(128.0 - 0.168_736 * r - 0.331_264 * g + 0.5 * b),
        clamp_u8(128.0 + 0.5 * r - 0.418_688 * g - 0.081_312 * b),
    ]
}

/// Chebyshev radius that reaches an exact preimage for every RGB triple in
/// the image of [`ycbcr_to_rgb`] (checked exhaustively over all 2^24 inputs).
const PREIMAGE_RADIUS: i32 = 6;

/// BT.601 full-range RGB to YCbCr. When the rounded result does not decode
/// back to `rgb`, the nearest exact preimage is searched in growing shells,
/// so any sample produced by [`ycbcr_to_rgb`] re-encodes losslessly.
pub fn rgb_to_ycbcr(rgb: [u8; 3]) -> [u8; 3] {
    let guess = rgb_to_ycbcr_rounded(rgb);
    if ycbcr_to_rgb(guess[0], guess[1], guess[2]) == rgb {
        return guess;
    }
    let [gy, gb, gr] = guess.map(i32::from);
    for radius in 1..=PREIMAGE_RADIUS {
        for dy in -radius..=radius {
            for db in -radius..=radius {
                for dr in -radius..=radius {
                    if dy.abs().max(db.abs()).max(dr.abs()) != radius {
                        continue;
                    }
                    let (y, cb, cr) = (gy + dy, gb + db, gr + dr);
                    if !(0..=255).contains(&y)
                        || !(0..=255).contains(&cb)
                        || !(0..=255).contains(&cr)
                    {
                        continue;
                    }
                    let cand = [y as u8, cb as u8, cr as u8];
                    if ycbcr_to_rgb(cand[0], cand[1], cand[2]) == rgb {
                        return cand;
                    }
                }
            }
        }
    }
    guess
}

/// Streaming Y4M decoder yielding RGB frames.
pub struct Y4mReader<R> {
    inner: R,
    geometry: FrameGeometry,
    fps: FrameRate,
    frames_read: usize,
    payload: Vec<u8>,
}

impl<R: BufRead> Y4mReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let line = match read_line(&mut inner, MAX_HEADER_LEN)? {
            Some((line, true)) => line,
            Some((_, false)) => return Err(Error::MalformedHeader("unterminated header".into())),
            None => return Err(Error::MalformedHeader("empty input".into())),
        };
        let line = std::str::from_utf8(&line)
            .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
        let (geometry, fps) = parse_header(line)?;
        Ok(Self {
            inner,
            geometry,
            fps,
            frames_read: 0,
            payload: vec![0; 3 * geometry.pixel_count()],
        })
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn fps(&self) -> FrameRate {
        self.fps
    }

    /// Reads the next frame, or `None` at a clean end of stream.
    pub fn next_frame(&mut self) -> Result<Option<RgbFrame>> {
        let index = self.frames_read;
        let Some((marker, terminated)) = read_line(&mut self.inner, MAX_HEADER_LEN)? else {
            return Ok(None);
        };
        let valid = terminated
            && marker.starts_with(FRAME_MARKER)
            && (marker.len() == FRAME_MARKER.len() || marker[FRAME_MARKER.len()] == b' ');
        if !valid {
            return Err(Error::MalformedFrameMarker { index });
        }

        let expected = self.payload.len();
        let actual = read_full(&mut self.inner, &mut self.payload)?;
        if actual < expected {
            return Err(Error::TruncatedFrame {
                index,
                expected,
                actual,
            });
        }

        let n = self.geometry.pixel_count();
        let (ys, rest) = self.payload.split_at(n);
        let (cbs, crs) = rest.split_at(n);
        let mut r = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let [pr, pg, pb] = ycbcr_to_rgb(ys[i], cbs[i], crs[i]);
            r.push(pr);
            g.push(pg);
            b.push(pb);
        }
        self.frames_read += 1;
        RgbFrame::from_planes(self.geometry, r, g, b).map(Some)
    }
}

impl<R: BufRead> Iterator for Y4mReader<R> {
    type Item = Result<RgbFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame().transpose()
    }
}

/// Reads a whole Y4M stream into memory.
pub fn parse_y4m<R: Read>(reader: R) -> Result<VideoStream> {
    let mut rd = Y4mReader::new(BufReader::new(reader))?;
    let mut frames = Vec::new();
    while let Some(f) = rd.next_frame()? {
        frames.push(f);
    }
    VideoStream::new(rd.geometry, rd.fps, frames)
}

/// Encodes `stream` as C444 Y4M; returns bytes written.
pub fn write_y4m<W: Write>(stream: &VideoStream, out: &mut W) -> Result<u64> {
    let g = stream.geometry();
    let fps = stream.fps();
    let header = format!(
        "{SIGNATURE} W{} H{} F{}:{} Ip A1:1 C444\n",
        g.width, g.height, fps.num, fps.den
    );
    out.write_all(header.as_bytes())?;
    let mut written = header.len() as u64;

    let n = g.pixel_count();
    let mut payload = vec![0u8; 3 * n];
    for frame in stream.frames() {
        let [r, gr, b] = frame.planes();
        for i in 0..n {
            let [y, cb, cr] = rgb_to_ycbcr([r[i], gr[i], b[i]]);
            payload[i] = y;
            payload[n + i] = cb;
            payload[2 * n + i] = cr;
        }
        out.write_all(b"FRAME\n")?;
        out.write_all(&payload)?;
        written += 6 + payload.len() as u64;
    }
    Ok(written)
}

fn parse_header(line: &str) -> Result<(FrameGeometry, FrameRate)> {
    let mut tokens = line.split(' ').filter(|t| !t.is_empty());
    if tokens.next() != Some(SIGNATURE) {
        return Err(Error::MalformedHeader(format!(
            "missing {SIGNATURE} signature"
        )));
    }

    let mut width = None;
    let mut height = None;
    let mut fps = None;
    let mut colorspace = None;
    for tok in tokens {
        if !tok.is_char_boundary(1) {
            return Err(Error::MalformedHeader(format!("bad token `{tok}`")));
        }
        let (tag, val) = tok.split_at(1);
        let dup = |name: &str| Error::MalformedHeader(format!("duplicate {name} token"));
        let bad = |name: &str| Error::MalformedHeader(format!("bad {name} token `{tok}`"));
        match tag {
            "W" => {
                if width
                    .replace(val.parse::<usize>().map_err(|_| bad("W"))?)
                    .is_some()
                {
                    return Err(dup("W"));
                }
            }
            "H" => {
                if height
                    .replace(val.parse::<usize>().map_err(|_| bad("H"))?)
                    .is_some()
                {
                    return Err(dup("H"));
                }
            }
            "F" => {
                let (n, d) = val.split_once(':').ok_or_else(|| bad("F"))?;
                let rate = FrameRate::new(
                    n.parse().map_err(|_| bad("F"))?,
                    d.parse().map_err(|_| bad("F"))?,
                )
                .map_err(|_| bad("F"))?;
                if fps.replace(rate).is_some() {
                    return Err(dup("F"));
                }
            }
            "C" => colorspace = Some(val.to_string()),
            // interlacing, aspect, comments
            _ => {}
        }
    }

    let width = width.ok_or_else(|| Error::MalformedHeader("missing W token".into()))?;
    let height = height.ok_or_else(|| Error::MalformedHeader("missing H token".into()))?;
    let fps = fps.ok_or_else(|| Error::MalformedHeader("missing F token".into()))?;
    let geometry = FrameGeometry::new(width, height)
        .map_err(|_| Error::MalformedHeader(format!("invalid size {width}x{height}")))?;
    // Absent C means the 4:2:0 default.
    let colorspace = colorspace.unwrap_or_else(|| "420jpeg".to_string());
    if colorspace != "444" {
        return Err(Error::UnsupportedColorspace(colorspace));
    }
    Ok((geometry, fps))
}

/// Reads up to and excluding `\n`. `None` if the reader is already at EOF;
/// the flag is false when EOF cut the line short.
fn read_line<R: BufRead>(r: &mut R, limit: usize) -> Result<Option<(Vec<u8>, bool)>> {
    let mut buf = Vec::new();
    let n = r
        .by_ref()
        .take(limit as u64 + 1)
        .read_until(b'\n', &mut buf)?;
    if n == 0 {
        return Ok(None);
    }
    if buf.last() != Some(&b'\n') {
        if buf.len() > limit {
            return Err(Error::MalformedHeader("line too long".into()));
        }
        return Ok(Some((buf, false)));
    }
    buf.pop();
    Ok(Some((buf, true)))
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(filled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y4m_bytes(header: &str, frames: usize, payload: &[u8]) -> Vec<u8> {
        let mut v = format!("{header}\n").into_bytes();
        for _ in 0..frames {
            v.extend_from_slice(b"FRAME\n");
            v.extend_from_slice(payload);
        }
        v
    }

    #[test]
    fn single_black_frame() {
        let bytes = y4m_bytes("YUV4MPEG2 W2 H2 F30:1 C444", 1, &[0; 12]);
        let s = parse_y4m(&bytes[..]).unwrap();
        assert_eq!(s.geometry(), FrameGeometry::new(2, 2).unwrap());
        assert_eq!(s.fps(), FrameRate::new(30, 1).unwrap());
        assert_eq!(s.len(), 1);
        let expected = ycbcr_to_rgb(0, 0, 0);
        for y in 0..2 {
            for x in 0..2 {
                assert_eq!(s.frames()[0].pixel(x, y), expected);
            }
        }
    }

    #[test]
    fn analysis_resolution_stream() {
        let payload = vec![128u8; 3 * 320 * 240];
        let bytes = y4m_bytes("YUV4MPEG2 W320 H240 F30:1 C444", 10, &payload);
        let s = parse_y4m(&bytes[..]).unwrap();
        assert_eq!(s.geometry(), FrameGeometry::ANALYSIS);
        assert_eq!(s.len(), 10);
        assert_eq!(s.frames()[9].pixel(319, 239), [128, 128, 128]);
    }

    #[test]
    fn header_errors() {
        let missing_f = y4m_bytes("YUV4MPEG2 W2 H2 C444", 1, &[0; 12]);
        assert!(matches!(
            parse_y4m(&missing_f[..]),
            Err(Error::MalformedHeader(_))
        ));

        let dup_w = y4m_bytes("YUV4MPEG2 W2 W2 H2 F30:1 C444", 1, &[0; 12]);
        assert!(matches!(
            parse_y4m(&dup_w[..]),
            Err(Error::MalformedHeader(_))
        ));

        let c420 = y4m_bytes("YUV4MPEG2 W2 H2 F30:1 C420jpeg", 0, &[]);
        assert!(matches!(
            parse_y4m(&c420[..]),
            Err(Error::UnsupportedColorspace(_))
        ));

        let no_c = y4m_bytes("YUV4MPEG2 W2 H2 F30:1", 0, &[]);
        assert!(matches!(
            parse_y4m(&no_c[..]),
            Err(Error::UnsupportedColorspace(_))
        ));

        let bad_sig = y4m_bytes("YUV4MPEG W2 H2 F30:1 C444", 0, &[]);
        assert!(matches!(
            parse_y4m(&bad_sig[..]),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn truncated_payload() {
        let bytes = y4m_bytes("YUV4MPEG2 W2 H2 F30:1 C444", 1, &[0; 11]);
        match parse_y4m(&bytes[..]) {
            Err(Error::TruncatedFrame {
                index: 0,
                expected: 12,
                actual: 11,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn frame_params_are_tolerated() {
        let mut bytes = b"YUV4MPEG2 W1 H1 F25:1 C444 XCOLORRANGE=FULL\nFRAME Ixyz\n".to_vec();
        bytes.extend_from_slice(&[16, 128, 128]);
        let s = parse_y4m(&bytes[..]).unwrap();
        assert_eq!(s.frames()[0].pixel(0, 0), [16, 16, 16]);
    }

    #[test]
    fn garbage_after_frame_is_rejected() {
        let mut bytes = y4m_bytes("YUV4MPEG2 W1 H1 F25:1 C444", 1, &[0, 0, 0]);
        bytes.extend_from_slice(b"FRAMX\n");
        assert!(matches!(
            parse_y4m(&bytes[..]),
            Err(Error::MalformedFrameMarker { index: 1 })
        ));
    }

    #[test]
    fn gray_is_exact() {
        for v in 0..=255u8 {
            assert_eq!(rgb_to_ycbcr([v, v, v]), [v, 128, 128]);
            assert_eq!(ycbcr_to_rgb(v, 128, 128), [v, v, v]);
        }
    }

    #[test]
    fn converter_output_is_a_fixed_point() {
        // Every RGB sample our decoder can produce re-encodes losslessly.
        for y in (0..=255u16).step_by(3) {
            for cb in (0..=255u16).step_by(5) {
                for cr in (0..=255u16).step_by(7) {
                    let rgb = ycbcr_to_rgb(y as u8, cb as u8, cr as u8);
                    let back = rgb_to_ycbcr(rgb);
                    assert_eq!(
                        ycbcr_to_rgb(back[0], back[1], back[2]),
                        rgb,
                        "ycc {y},{cb},{cr}"
                    );
                }
            }
        }
    }

    #[test]
    fn payload_accounting() {
        let payload = vec![7u8; 3 * 4 * 3];
        let bytes = y4m_bytes("YUV4MPEG2 W4 H3 F30:1 C444", 5, &payload);
        let header_len = "YUV4MPEG2 W4 H3 F30:1 C444\n".len();
        let s = parse_y4m(&bytes[..]).unwrap();
        assert_eq!(s.len() * 3 * 4 * 3 + s.len() * 6, bytes.len() - header_len);
    }
}
