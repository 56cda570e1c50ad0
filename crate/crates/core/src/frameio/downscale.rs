//! Area-average (box filter) downscaling.
//!
//! Each axis is mapped onto a common integer grid where a source pixel spans
//! `dst` units and a destination pixel spans `src` units; overlaps are then
//! exact integer weights and the whole filter runs in integer arithmetic.

use super::{FrameGeometry, RgbFrame};
use crate::error::{Error, Result};

/// `(first source index, weights)` for each destination index.
fn axis_weights(src: usize, dst: usize) -> Vec<(usize, Vec<u64>)> {
    (0..dst)
        .map(|o| {
            let lo = o * src;
            let hi = lo + src;
            let first = lo / dst;
            let last = (hi - 1) / dst;
            let weights = (first..=last)
                .map(|j| {
                    let s_lo = j * dst;
                    let s_hi = s_lo + dst;
                    (hi.min(s_hi) - lo.max(s_lo)) as u64
                })
                .collect();
            (first, weights)
        })
        .collect()
}

/// Weighted sums of one plane; each result is scaled by `src.width * src.height`.
fn plane_sums(
    plane: &[u8],
    src: FrameGeometry,
    cols: &[(usize, Vec<u64>)],
    rows: &[(usize, Vec<u64>)],
    out: &mut [u64],
) {
    let tw = cols.len();
    let mut horiz = vec![0u64; src.height * tw];
    for y in 0..src.height {
        let row = &plane[y * src.width..(y + 1) * src.width];
        for (ox, (first, ws)) in cols.iter().enumerate() {
            horiz[y * tw + ox] = ws
                .iter()
                .zip(&row[*first..])
                .map(|(w, &v)| w * u64::from(v))
                .sum();
        }
    }
    for (oy, (first, ws)) in rows.iter().enumerate() {
        for ox in 0..tw {
            out[oy * tw + ox] = ws
                .iter()
                .enumerate()
                .map(|(k, w)| w * horiz[(first + k) * tw + ox])
                .sum();
        }
    }
}

fn check_target(src: FrameGeometry, target: FrameGeometry) -> Result<()> {
    if target.width > src.width || target.height > src.height {
        return Err(Error::UpscaleRequested {
            source_geometry: src,
            target,
        });
    }
    Ok(())
}

/// Box-filter downscale to `target`, rounding each channel to the nearest
/// integer with ties away from zero. Identity when geometries match.
pub fn downscale_area(frame: &RgbFrame, target: FrameGeometry) -> Result<RgbFrame> {
    let src = frame.geometry();
    check_target(src, target)?;
    if src == target {
        return Ok(frame.clone());
    }
    let cols = axis_weights(src.width, target.width);
    let rows = axis_weights(src.height, target.height);
    let den = (src.width * src.height) as u64;
    let mut sums = vec![0u64; target.pixel_count()];
    let planes = frame.planes().map(|plane| {
        plane_sums(plane, src, &cols, &rows, &mut sums);
        sums.iter()
            .map(|&s| ((2 * s + den) / (2 * den)) as u8)
            .collect::<Vec<u8>>()
    });
    let [r, g, b] = planes;
    RgbFrame::from_planes(target, r, g, b)
}

/// Unquantized variant: the area-mean of the per-pixel channel average
/// `(R+G+B)/3` at `target` resolution.
pub fn downscale_area_mean(frame: &RgbFrame, target: FrameGeometry) -> Result<Vec<f64>> {
    let src = frame.geometry();
    check_target(src, target)?;
    let [r, g, b] = frame.planes();
    if src == target {
        return Ok((0..src.pixel_count())
            .map(|i| f64::from(u16::from(r[i]) + u16::from(g[i]) + u16::from(b[i])) / 3.0)
            .collect());
    }
    let cols = axis_weights(src.width, target.width);
    let rows = axis_weights(src.height, target.height);
    let n = target.pixel_count();
    let mut total = vec![0u64; n];
    let mut sums = vec![0u64; n];
    for plane in [r, g, b] {
        plane_sums(plane, src, &cols, &rows, &mut sums);
        total.iter_mut().zip(&sums).for_each(|(t, s)| *t += s);
    }
    let den = (3 * src.width * src.height) as f64;
    Ok(total.into_iter().map(|t| t as f64 / den).collect())
}
