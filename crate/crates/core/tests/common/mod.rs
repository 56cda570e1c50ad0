#![allow(dead_code)]

use flashguard::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn geom(w: usize, h: usize) -> FrameGeometry {
    FrameGeometry::new(w, h).unwrap()
}

pub fn fps(n: u32) -> FrameRate {
    FrameRate::integer(n).unwrap()
}

/// Strobes used by the sanitizer and format checks.
pub fn strobe_corpus() -> Vec<StrobeSpec> {
    let g = geom(64, 48);
    let base = StrobeSpec::full_screen(g, fps(30), 60);
    vec![
        base,
        StrobeSpec {
            duration_frames: 300,
            ..base
        },
        StrobeSpec {
            period_frames: 2,
            duration_frames: 240,
            ..base
        },
        StrobeSpec {
            period_frames: 3,
            duration_frames: 300,
            ..base
        },
        StrobeSpec {
            period_frames: 15,
            ..base
        },
        StrobeSpec {
            region_fraction: 0.3,
            duration_frames: 150,
            ..base
        },
        StrobeSpec {
            region_fraction: 0.2,
            duration_frames: 150,
            ..base
        },
        StrobeSpec {
            low_gray: 40,
            high_gray: 140,
            duration_frames: 200,
            ..base
        },
        StrobeSpec {
            fps: fps(25),
            duration_frames: 500,
            ..base
        },
        StrobeSpec {
            geometry: geom(320, 240),
            duration_frames: 90,
            ..base
        },
    ]
}

/// Random 64x48 stream: noisy background with strobe bursts of random
/// period, area and contrast.
pub fn random_stream(seed: u64) -> VideoStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = geom(64, 48);
    let n = g.pixel_count();
    let frames_total = rng.gen_range(30..=300);
    let rate = *[24u32, 25, 30, 50, 60].get(rng.gen_range(0..5)).unwrap();
    let noise = rng.gen_range(0..=40i32);
    let colored = rng.gen_bool(0.3);
    let base = rng.gen_range(0..=200u8);

    // bursts: (start, len, period, region, low, high)
    let mut bursts = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let start = rng.gen_range(0..frames_total);
        let len = rng.gen_range(4..=120);
        let period = rng.gen_range(1..=8usize);
        let region = rng.gen_range(0.05..=1.0f64);
        let low = rng.gen_range(0..=150u8);
        let high = rng.gen_range(low + 1..=255u8);
        bursts.push((start, len, period, region, low, high));
    }

    let mut frames = Vec::with_capacity(frames_total);
    for k in 0..frames_total {
        let mut level = vec![base; n];
        for &(start, len, period, region, low, high) in &bursts {
            if k >= start && k < start + len {
                let on = ((k - start) / period) % 2 == 1;
                let count = (region * n as f64) as usize;
                for v in &mut level[..count] {
                    *v = if on { high } else { low };
                }
            }
        }
        let mut planes = [vec![0u8; n], vec![0u8; n], vec![0u8; n]];
        for i in 0..n {
            let shared = if noise > 0 {
                rng.gen_range(-noise..=noise)
            } else {
                0
            };
            for plane in planes.iter_mut() {
                let jitter = if colored && noise > 0 {
                    rng.gen_range(-noise..=noise)
                } else {
                    shared
                };
                plane[i] = (i32::from(level[i]) + jitter).clamp(0, 255) as u8;
            }
        }
        let [r, gg, b] = planes;
        frames.push(RgbFrame::from_planes(g, r, gg, b).unwrap());
    }
    VideoStream::new(g, fps(rate), frames).unwrap()
}
