//! Numbered binary PPM (P6, maxval 255) sequences with a `meta.json` sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{FrameGeometry, FrameRate, RgbFrame, VideoStream};
use crate::error::{Error, Result};

pub const META_FILE: &str = "meta.json";

/// Sidecar carrying the frame rate of a PPM sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamMeta {
    pub fps_num: u32,
    pub fps_den: u32,
}

/// Reads `NNNNNN.ppm` files from `dir` in numeric order.
///
/// `fps` overrides the sidecar; one of the two must be present.
pub fn read_ppm_sequence(dir: &Path, fps: Option<FrameRate>) -> Result<VideoStream> {
    let mut files: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if let Some(index) = frame_index(&path) {
            files.push((index, path));
        }
    }
    if files.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    files.sort();

    let fps = match fps {
        Some(f) => f,
        None => read_meta(dir)?,
    };

    let mut frames = Vec::with_capacity(files.len());
    let mut geometry = None;
    for (_, path) in &files {
        let frame = read_ppm(path)?;
        match geometry {
            None => geometry = Some(frame.geometry()),
            Some(g) if g != frame.geometry() => {
                return Err(Error::GeometryMismatch {
                    expected: g,
                    actual: frame.geometry(),
                })
            }
            Some(_) => {}
        }
        frames.push(frame);
    }
    VideoStream::new(geometry.expect("at least one file"), fps, frames)
}

/// Writes frames as `000001.ppm`, `000002.ppm`, ... plus `meta.json`.
/// Returns the total number of bytes written.
pub fn write_ppm_sequence(stream: &VideoStream, dir: &Path) -> Result<u64> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    fs::create_dir_all(dir)?;
    let g = stream.geometry();
    let header = format!("P6\n{} {}\n255\n", g.width, g.height);
    let mut written = 0u64;
    for (i, frame) in stream.frames().iter().enumerate() {
        let path = dir.join(format!("{:06}.ppm", i + 1));
        let mut out = std::io::BufWriter::new(fs::File::create(path)?);
        out.write_all(header.as_bytes())?;
        let payload = frame.to_interleaved();
        out.write_all(&payload)?;
        out.flush()?;
        written += (header.len() + payload.len()) as u64;
    }
    let meta = serde_json::to_vec(&StreamMeta {
        fps_num: stream.fps().num,
        fps_den: stream.fps().den,
    })?;
    fs::write(dir.join(META_FILE), &meta)?;
    Ok(written + meta.len() as u64)
}

fn frame_index(path: &Path) -> Option<u64> {
    if path.extension()?.to_str()? != "ppm" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    if stem.is_empty() || !stem.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    stem.parse().ok()
}

fn read_meta(dir: &Path) -> Result<FrameRate> {
    let path = dir.join(META_FILE);
    let bytes = match fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingFrameRate("ppm sequence"))
        }
        Err(e) => return Err(e.into()),
    };
    let meta: StreamMeta = serde_json::from_slice(&bytes)?;
    FrameRate::new(meta.fps_num, meta.fps_den)
}

fn read_ppm(path: &Path) -> Result<RgbFrame> {
    let bytes = fs::read(path)?;
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
        });
    }
    let malformed = |reason: &str| Error::MalformedPpm {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };

    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(malformed("header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed("bad header number"))?;
    }
    // exactly one whitespace byte before the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(malformed("missing separator before raster"));
    }
    pos += 1;

    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(malformed("maxval must be 255"));
    }
    let geometry = FrameGeometry::new(width, height).map_err(|_| malformed("zero size"))?;
    let raster = &bytes[pos..];
    if raster.len() < 3 * geometry.pixel_count() {
        return Err(malformed("raster shorter than width*height*3"));
    }
    RgbFrame::from_interleaved(geometry, &raster[..3 * geometry.pixel_count()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn put(dir: &Path, name: &str, g: FrameGeometry, fill: u8) {
        let mut v = format!("P6\n# comment\n{} {}\n255\n", g.width, g.height).into_bytes();
        v.extend(std::iter::repeat_n(fill, 3 * g.pixel_count()));
        fs::write(dir.join(name), v).unwrap();
    }

    #[test]
    fn reads_in_numeric_order() {
        let dir = tempfile::tempdir().unwrap();
        let g = FrameGeometry::new(4, 4).unwrap();
        put(dir.path(), "000003.ppm", g, 3);
        put(dir.path(), "000001.ppm", g, 1);
        put(dir.path(), "000002.ppm", g, 2);
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let s = read_ppm_sequence(dir.path(), Some(FrameRate::integer(30).unwrap())).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.geometry(), g);
        for (i, f) in s.frames().iter().enumerate() {
            assert_eq!(f.pixel(0, 0), [i as u8 + 1; 3]);
        }
    }

    #[test]
    fn geometry_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        put(
            dir.path(),
            "000001.ppm",
            FrameGeometry::new(4, 4).unwrap(),
            0,
        );
        put(
            dir.path(),
            "000002.ppm",
            FrameGeometry::new(8, 8).unwrap(),
            0,
        );
        let err = read_ppm_sequence(dir.path(), Some(FrameRate::integer(30).unwrap()));
        assert!(matches!(err, Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn empty_and_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let fps = Some(FrameRate::integer(30).unwrap());
        assert!(matches!(
            read_ppm_sequence(dir.path(), fps),
            Err(Error::EmptyDirectory(_))
        ));
        fs::write(dir.path().join("000001.ppm"), b"P3\n1 1\n255\n0 0 0\n").unwrap();
        assert!(matches!(
            read_ppm_sequence(dir.path(), fps),
            Err(Error::BadMagic { .. })
        ));
    }

    #[test]
    fn fps_from_sidecar_or_missing() {
        let dir = tempfile::tempdir().unwrap();
        put(
            dir.path(),
            "000001.ppm",
            FrameGeometry::new(1, 1).unwrap(),
            9,
        );
        assert!(matches!(
            read_ppm_sequence(dir.path(), None),
            Err(Error::MissingFrameRate(_))
        ));
        fs::write(dir.path().join(META_FILE), r#"{"fps_num":25,"fps_den":1}"#).unwrap();
        assert_eq!(
            read_ppm_sequence(dir.path(), None).unwrap().fps(),
            FrameRate::integer(25).unwrap()
        );
    }

    #[test]
    fn single_frame_payload_size() {
        let dir = tempfile::tempdir().unwrap();
        let g = FrameGeometry::new(2, 2).unwrap();
        let s = VideoStream::new(
            g,
            FrameRate::integer(30).unwrap(),
            vec![RgbFrame::filled(g, [1, 2, 3])],
        )
        .unwrap();
        write_ppm_sequence(&s, dir.path()).unwrap();
        let ppms: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| frame_index(&e.unwrap().path()))
            .collect();
        assert_eq!(ppms, vec![1]);
        let bytes = fs::read(dir.path().join("000001.ppm")).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(bytes.len() - header.len(), 12);
        assert_eq!(read_ppm_sequence(dir.path(), None).unwrap(), s);
    }
}
