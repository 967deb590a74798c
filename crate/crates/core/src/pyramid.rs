//! Down-sampling primitives: 2×2 pooling between pyramid levels, the
//! viewing-distance pre-scaling several metrics apply, and bilinear resizing.

use crate::error::{IqaError, Result};
use crate::image::Plane;

/// Non-overlapping `factor × factor` block means; trailing rows and columns
/// that do not fill a block are dropped.
pub fn avg_pool(plane: &Plane, factor: usize) -> Result<Plane> {
    let (h, w) = plane.dims();
    if factor == 0 || h < factor || w < factor {
        return Err(IqaError::TooSmall {
            what: "average pooling",
            min_height: factor.max(1),
            min_width: factor.max(1),
            height: h,
            width: w,
        });
    }
    if factor == 1 {
        return Ok(plane.clone());
    }
    let (oh, ow) = (h / factor, w / factor);
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh * factor {
        let src = plane.row(r);
        let dst = &mut out[(r / factor) * ow..(r / factor + 1) * ow];
        for (c, d) in dst.iter_mut().enumerate() {
            *d += src[c * factor..(c + 1) * factor].iter().sum::<f64>();
        }
    }
    let norm = (factor * factor) as f64;
    out.iter_mut().for_each(|v| *v /= norm);
    Plane::new(oh, ow, out)
}

/// 2×2 mean pooling to `⌊H/2⌋ × ⌊W/2⌋`.
pub fn avg_pool2(plane: &Plane) -> Result<Plane> {
    avg_pool(plane, 2)
}

/// Pre-scaling factor `max(1, round(min(H, W) / 256))`, rounding half to even.
///
/// Several metrics shrink large inputs by this factor to emulate a fixed
/// viewing distance.
pub fn viewing_distance_factor(height: usize, width: usize) -> usize {
    let f = (height.min(width) as f64 / 256.0).round_ties_even();
    (f as usize).max(1)
}

/// Applies [`viewing_distance_factor`] block averaging.
pub fn viewing_distance_downsample(plane: &Plane) -> Result<Plane> {
    avg_pool(
        plane,
        viewing_distance_factor(plane.height(), plane.width()),
    )
}

/// Bilinear resampling with half-pixel centers (no anti-aliasing).
pub fn resize_bilinear(plane: &Plane, height: usize, width: usize) -> Plane {
    let (h, w) = plane.dims();
    let axis = |out: usize, inp: usize| -> Vec<(usize, usize, f64)> {
        let scale = inp as f64 / out as f64;
        (0..out)
            .map(|o| {
                let src = ((o as f64 + 0.5) * scale - 0.5).max(0.0);
                let i0 = (src.floor() as usize).min(inp - 1);
                let i1 = (i0 + 1).min(inp - 1);
                (i0, i1, src - i0 as f64)
            })
            .collect()
    };
    let rows = axis(height, h);
    let cols = axis(width, w);
    Plane::from_fn(height, width, |r, c| {
        let (r0, r1, fr) = rows[r];
        let (c0, c1, fc) = cols[c];
        let top = plane.get(r0, c0) * (1.0 - fc) + plane.get(r0, c1) * fc;
        let bottom = plane.get(r1, c0) * (1.0 - fc) + plane.get(r1, c1) * fc;
        top * (1.0 - fr) + bottom * fr
    })
}
