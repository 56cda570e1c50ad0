//! Synthetic strobe videos with known flash structure, and a naive
//! transcription of the reference detector used as a test oracle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flashdetect::{AnalysisConfig, ScanMode};
use crate::frameio::{FrameGeometry, FrameRate, RgbFrame, VideoStream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrobeSpec {
    pub geometry: FrameGeometry,
    pub fps: FrameRate,
    pub duration_frames: usize,
    /// Frames per half cycle.
    pub period_frames: usize,
    pub low_gray: u8,
    pub high_gray: u8,
    /// Fraction of the screen that flashes, filled row-major from the top left.
    pub region_fraction: f64,
}

impl StrobeSpec {
    /// Full-screen black/white strobe switching every frame.
    pub fn full_screen(geometry: FrameGeometry, fps: FrameRate, duration_frames: usize) -> Self {
        Self {
            geometry,
            fps,
            duration_frames,
            period_frames: 1,
            low_gray: 0,
            high_gray: 255,
            region_fraction: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.duration_frames < 2 {
            return Err(Error::InvalidConfig(format!(
                "duration must be at least 2 frames, got {}",
                self.duration_frames
            )));
        }
        if self.period_frames < 1 {
            return Err(Error::InvalidConfig(
                "period must be at least 1 frame".into(),
            ));
        }
        if self.low_gray >= self.high_gray {
            return Err(Error::InvalidConfig(format!(
                "low gray {} must be below high gray {}",
                self.low_gray, self.high_gray
            )));
        }
        if !(self.region_fraction > 0.0 && self.region_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "region fraction must be in (0, 1], got {}",
                self.region_fraction
            )));
        }
        Ok(())
    }

    /// `floor(region_fraction * pixels)`, snapping products within 1e-9 of
    /// an integer.
    pub fn flashing_pixels(&self) -> usize {
        let n = self.geometry.pixel_count();
        let exact = n as f64 * self.region_fraction;
        let nearest = exact.round();
        let count = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) {
            nearest
        } else {
            exact.floor()
        };
        (count as usize).min(n)
    }

    /// Whether frame `k` shows the high level in the flashing region.
    pub fn is_high(&self, k: usize) -> bool {
        (k / self.period_frames) % 2 == 1
    }
}

pub fn gen_strobe(spec: &StrobeSpec) -> Result<VideoStream> {
    spec.validate()?;
    let n = spec.geometry.pixel_count();
    let region = spec.flashing_pixels();
    let low = RgbFrame::filled(spec.geometry, [spec.low_gray; 3]);
    let mut high_plane = vec![spec.low_gray; n];
    high_plane[..region].fill(spec.high_gray);
    let high = RgbFrame::gray(spec.geometry, high_plane)?;
    let frames = (0..spec.duration_frames)
        .map(|k| {
            if spec.is_high(k) {
                high.clone()
            } else {
                low.clone()
            }
        })
        .collect();
    VideoStream::new(spec.geometry, spec.fps, frames)
}

/// Trigger count the reference transcription reports for `gen_strobe(spec)`.
pub fn expected_triggers(spec: &StrobeSpec, cfg: &AnalysisConfig) -> Result<usize> {
    let stream = gen_strobe(spec)?;
    Ok(oracle::transcribe(&stream, cfg)?.num_triggers)
}

/// A deliberately literal re-implementation of the reference detector:
/// full sorts, per-stage vectors, no shared code with the production path
/// beyond the frame containers and (for oversized input) the resampler.
///
/// It covers reference and strict scan modes only; the dark gate and
/// trailing-run flush are not part of the reference procedure and are
/// ignored.
#[allow(clippy::needless_range_loop)]
pub mod oracle {
    use super::*;
    use crate::frameio::downscale_area;

    #[derive(Debug, Clone, PartialEq)]
    pub struct OracleOutput {
        pub table: Vec<f64>,
        pub fin: Vec<f64>,
        pub fin_frames: Vec<usize>,
        pub ep_frm: Vec<usize>,
        pub rem_frm: Vec<usize>,
        pub num_triggers: usize,
    }

    fn lum(mean: f64) -> f64 {
        413.435 * (0.002745 * mean + 0.0189623).powf(2.2)
    }

    fn quarter(pixels: usize, k: f64) -> usize {
        if k == 0.25 {
            return pixels.div_ceil(4);
        }
        let x = pixels as f64 * k;
        let r = x.round();
        if (x - r).abs() <= 1e-9 * x.max(1.0) {
            r as usize
        } else {
            x.ceil() as usize
        }
    }

    pub fn run(frames: &[Vec<[u8; 3]>], k: f64, strict: bool) -> Vec<f64> {
        let avg_lum_frames: Vec<Vec<f64>> = frames
            .iter()
            .map(|f| {
                f.iter()
                    .map(|p| lum((p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0))
                    .collect()
            })
            .collect();
        let mut table = Vec::new();
        for n in 1..avg_lum_frames.len() {
            let change: Vec<f64> = avg_lum_frames[n]
                .iter()
                .zip(&avg_lum_frames[n - 1])
                .map(|(a, b)| a - b)
                .collect();
            let mut pos_lum: Vec<f64> = change
                .iter()
                .map(|&c| if c < 0.0 { 0.0 } else { c })
                .collect();
            let mut neg_lum: Vec<f64> = change
                .iter()
                .map(|&c| if -c < 0.0 { 0.0 } else { -c })
                .collect();
            pos_lum.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pos_lum.reverse();
            neg_lum.sort_by(|a, b| a.partial_cmp(b).unwrap());
            neg_lum.reverse();
            let q = quarter(pos_lum.len(), k);
            let mut p_avg = 0.0;
            for v in &pos_lum[..q] {
                p_avg += v;
            }
            p_avg /= q as f64;
            let mut n_avg = 0.0;
            for v in &neg_lum[..q] {
                n_avg += v;
            }
            n_avg /= q as f64;
            if strict {
                if pos_lum.iter().filter(|&&v| v > 0.0).count() < q {
                    p_avg = 0.0;
                }
                if neg_lum.iter().filter(|&&v| v > 0.0).count() < q {
                    n_avg = 0.0;
                }
            }
            let t = p_avg - n_avg;
            table.push(if t > 0.0 { p_avg } else { -n_avg });
        }
        table
    }

    pub fn get_fin_frame(table: &[f64]) -> (Vec<usize>, Vec<f64>) {
        let get_sign = |x: f64| if x > 0.0 { "pos" } else { "neg" };
        let mut fin = Vec::new();
        let mut fin_frames = Vec::new();
        if table.is_empty() {
            return (fin_frames, fin);
        }
        let mut cum = table[0];
        let mut fin_frame = 1;
        for change in 0..table.len() - 1 {
            if get_sign(table[change]) == get_sign(table[change + 1]) {
                cum += table[change + 1];
                fin_frame += 1;
            } else {
                fin.push(cum);
                fin_frames.push(fin_frame);
                cum = table[change + 1];
                fin_frame = change + 2;
            }
        }
        (fin_frames, fin)
    }

    pub fn get_ep_and_rm_frm(
        fin_frames: &[usize],
        fin: &[f64],
        threshold: f64,
    ) -> (Vec<usize>, Vec<usize>) {
        let mut ep_frm = Vec::new();
        let mut rem_frm = Vec::new();
        let mut prev = 0;
        for x in 0..fin.len() {
            if fin[x].abs() >= threshold {
                let frame_inc = fin_frames[x] - prev;
                prev = fin_frames[x];
                rem_frm.push(fin_frames[x]);
                ep_frm.push(frame_inc);
            }
        }
        (ep_frm, rem_frm)
    }

    pub fn possible_triggers(ep_frm: &[usize], fps: f64) -> usize {
        let mut ext = 0;
        let mut score = 0.0;
        let mut hits = 0;
        for a in 0..ep_frm.len() {
            if score < fps {
                score += ep_frm[a] as f64;
                hits += 1;
            } else {
                if hits > 3 {
                    ext += 1;
                }
                score = 0.0;
                hits = 0;
            }
        }
        ext
    }

    /// Runs the whole reference procedure on `stream`.
    pub fn transcribe(stream: &VideoStream, cfg: &AnalysisConfig) -> Result<OracleOutput> {
        let target = stream.geometry().clamp_to(cfg.analysis_geometry);
        let mut frames = Vec::with_capacity(stream.len());
        for f in stream.frames() {
            let f = downscale_area(f, target)?;
            let g = f.geometry();
            let mut px = Vec::with_capacity(g.pixel_count());
            for y in 0..g.height {
                for x in 0..g.width {
                    px.push(f.pixel(x, y));
                }
            }
            frames.push(px);
        }
        let table = run(
            &frames,
            cfg.area_fraction,
            cfg.scan_mode == ScanMode::Strict,
        );
        let (fin_frames, fin) = get_fin_frame(&table);
        let (ep_frm, rem_frm) = get_ep_and_rm_frm(&fin_frames, &fin, cfg.flash_threshold);
        let num_triggers = possible_triggers(&ep_frm, stream.fps().as_f64());
        Ok(OracleOutput {
            table,
            fin,
            fin_frames,
            ep_frm,
            rem_frm,
            num_triggers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> FrameGeometry {
        FrameGeometry::new(64, 48).unwrap()
    }

    fn fps30() -> FrameRate {
        FrameRate::integer(30).unwrap()
    }

    #[test]
    fn full_screen_strobe_layout() {
        let spec = StrobeSpec::full_screen(geom(), fps30(), 60);
        let s = gen_strobe(&spec).unwrap();
        assert_eq!(s.len(), 60);
        assert_eq!(s.frames()[0].pixel(0, 0), [0; 3]);
        assert_eq!(s.frames()[1].pixel(63, 47), [255; 3]);
        assert_eq!(
            expected_triggers(&spec, &AnalysisConfig::default()).unwrap(),
            1
        );
    }

    #[test]
    fn slow_alternation() {
        let spec = StrobeSpec {
            period_frames: 15,
            ..StrobeSpec::full_screen(geom(), fps30(), 60)
        };
        let s = gen_strobe(&spec).unwrap();
        let highs: Vec<usize> = (0..60)
            .filter(|&k| s.frames()[k].pixel(0, 0)[0] == 255)
            .collect();
        assert_eq!(highs, (15..30).chain(45..60).collect::<Vec<_>>());
        assert_eq!(
            expected_triggers(&spec, &AnalysisConfig::default()).unwrap(),
            0
        );
    }

    #[test]
    fn region_is_row_major_prefix() {
        let spec = StrobeSpec {
            region_fraction: 0.2,
            ..StrobeSpec::full_screen(geom(), fps30(), 4)
        };
        assert_eq!(spec.flashing_pixels(), 614);
        let s = gen_strobe(&spec).unwrap();
        let high = s.frames()[1].planes()[0];
        assert_eq!(high.iter().filter(|&&v| v == 255).count(), 614);
        assert!(high[..614].iter().all(|&v| v == 255));
        // 9 full rows of 64 plus 38 pixels of the tenth
        assert_eq!(s.frames()[1].pixel(37, 9), [255; 3]);
        assert_eq!(s.frames()[1].pixel(38, 9), [0; 3]);
    }

    #[test]
    fn partial_area_modes() {
        let spec = StrobeSpec {
            region_fraction: 0.2,
            ..StrobeSpec::full_screen(geom(), fps30(), 60)
        };
        assert_eq!(
            expected_triggers(&spec, &AnalysisConfig::strict()).unwrap(),
            0
        );
        assert!(expected_triggers(&spec, &AnalysisConfig::default()).unwrap() > 0);
    }

    #[test]
    fn constant_video_has_no_triggers() {
        let spec = StrobeSpec {
            period_frames: 1000,
            ..StrobeSpec::full_screen(geom(), fps30(), 300)
        };
        assert_eq!(
            expected_triggers(&spec, &AnalysisConfig::default()).unwrap(),
            0
        );
    }

    #[test]
    fn spec_validation() {
        let ok = StrobeSpec::full_screen(geom(), fps30(), 2);
        assert!(ok.validate().is_ok());
        for bad in [
            StrobeSpec {
                duration_frames: 1,
                ..ok
            },
            StrobeSpec {
                period_frames: 0,
                ..ok
            },
            StrobeSpec {
                low_gray: 200,
                high_gray: 200,
                ..ok
            },
            StrobeSpec {
                region_fraction: 0.0,
                ..ok
            },
        ] {
            assert!(gen_strobe(&bad).is_err());
        }
    }

    #[test]
    fn doubling_duration_never_lowers_count() {
        for period in 1..6 {
            for frames in [20, 45, 90, 121] {
                let spec = StrobeSpec {
                    period_frames: period,
                    ..StrobeSpec::full_screen(FrameGeometry::new(8, 8).unwrap(), fps30(), frames)
                };
                let doubled = StrobeSpec {
                    duration_frames: 2 * frames,
                    ..spec
                };
                let cfg = AnalysisConfig::default();
                assert!(
                    expected_triggers(&doubled, &cfg).unwrap()
                        >= expected_triggers(&spec, &cfg).unwrap()
                );
            }
        }
    }
}
