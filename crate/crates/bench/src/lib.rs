//! Deterministic inputs shared by the benchmarks.

use flashguard::prelude::*;

/// `n` frames of xorshift noise around alternating dark and bright levels.
pub fn noisy_strobe(geometry: FrameGeometry, n: usize) -> Vec<RgbFrame> {
    let mut state = 0x2545_F491_4F6C_DD1Du64;
    (0..n)
        .map(|k| {
            let base: i32 = if k % 2 == 1 { 200 } else { 30 };
            let gray = (0..geometry.pixel_count())
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (base + (state % 40) as i32 - 20).clamp(0, 255) as u8
                })
                .collect();
            RgbFrame::gray(geometry, gray).expect("gray plane matches geometry")
        })
        .collect()
}
