use std::f64::consts::PI;

use super::FeatureMatrix;
use crate::error::{IqaError, Result};
use crate::image::{Image, Plane};

pub const PATCH_SIZE: usize = 96;
pub const PATCH_STRIDE: usize = 32;
/// 64 block means plus 4 orientation-histogram bins.
pub const RAW_FEATURE_DIM: usize = 68;

const GRID: usize = 8;
const BINS: usize = 4;

/// Overlapping square crops of one image.
#[derive(Clone, Debug)]
pub struct PatchSet {
    patches: Vec<Image>,
    offsets: Vec<(usize, usize)>,
    source: (usize, usize),
}

impl PatchSet {
    pub fn patches(&self) -> &[Image] {
        &self.patches
    }

    /// Top-left corner of each patch.
    pub fn offsets(&self) -> &[(usize, usize)] {
        &self.offsets
    }

    /// `(height, width)` of the source image.
    pub fn source_dims(&self) -> (usize, usize) {
        self.source
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }
}

fn axis_offsets(n: usize) -> Vec<usize> {
    let last = n - PATCH_SIZE;
    let mut v: Vec<usize> = (0..=last).step_by(PATCH_STRIDE).collect();
    if *v.last().expect("at least offset 0") != last {
        v.push(last);
    }
    v
}

/// 96×96 crops on a stride-32 grid, plus crops anchored at the bottom and
/// right borders when the grid stops short of them.
pub fn patchify(img: &Image) -> Result<PatchSet> {
    let (h, w) = (img.height(), img.width());
    if h < PATCH_SIZE || w < PATCH_SIZE {
        return Err(IqaError::TooSmall {
            what: "patch extraction",
            min_height: PATCH_SIZE,
            min_width: PATCH_SIZE,
            height: h,
            width: w,
        });
    }
    let mut patches = Vec::new();
    let mut offsets = Vec::new();
    for &r in &axis_offsets(h) {
        for &c in &axis_offsets(w) {
            let planes = img
                .planes()
                .iter()
                .map(|p| p.crop(r, c, PATCH_SIZE, PATCH_SIZE))
                .collect();
            patches.push(Image::from_planes(planes)?);
            offsets.push((r, c));
        }
    }
    Ok(PatchSet {
        patches,
        offsets,
        source: (h, w),
    })
}

fn patch_features(luma: &Plane) -> Vec<f64> {
    let (h, w) = luma.dims();
    let (bh, bw) = (h / GRID, w / GRID);
    let mut out = Vec::with_capacity(RAW_FEATURE_DIM);
    for i in 0..GRID {
        for j in 0..GRID {
            out.push(luma.crop(i * bh, j * bw, bh, bw).mean());
        }
    }
    // magnitude-weighted histogram of forward-difference orientations,
    // folded to [0, π) and split into four equal bins
    let mut hist = [0.0; BINS];
    for r in 0..h - 1 {
        for c in 0..w - 1 {
            let v = luma.get(r, c);
            let (gx, gy) = (luma.get(r, c + 1) - v, luma.get(r + 1, c) - v);
            let mag = gx.hypot(gy);
            if mag == 0.0 {
                continue;
            }
            let theta = gy.atan2(gx).rem_euclid(PI);
            let bin = ((theta / (PI / BINS as f64)) as usize).min(BINS - 1);
            hist[bin] += mag;
        }
    }
    let n = ((h - 1) * (w - 1)) as f64;
    out.extend(hist.iter().map(|v| v / n));
    out
}

/// Hand-crafted 68-dimensional patch descriptor: 8×8 grid of luma block
/// means, then a 4-bin gradient orientation histogram normalized by the
/// number of gradient samples.
pub fn raw_features(patches: &PatchSet) -> Result<FeatureMatrix> {
    if patches.is_empty() {
        return Err(IqaError::InvalidArgument("no patches".into()));
    }
    let data: Vec<f64> = patches
        .patches()
        .iter()
        .flat_map(|p| patch_features(&p.luma()))
        .collect();
    FeatureMatrix::new(patches.len(), RAW_FEATURE_DIM, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    fn offsets(h: usize, w: usize) -> Vec<(usize, usize)> {
        patchify(&Image::constant(h, w, 1, 0.0).unwrap())
            .unwrap()
            .offsets()
            .to_vec()
    }

    #[test]
    fn enumeration() {
        assert_eq!(offsets(96, 96), vec![(0, 0)]);
        assert_eq!(offsets(128, 128), vec![(0, 0), (0, 32), (32, 0), (32, 32)]);
        assert_eq!(offsets(160, 96), vec![(0, 0), (32, 0), (64, 0)]);
        // 100 px: grid {0}, border anchor 4
        assert_eq!(offsets(100, 96), vec![(0, 0), (4, 0)]);
        assert!(patchify(&Image::constant(95, 200, 1, 0.0).unwrap()).is_err());
    }

    #[test]
    fn patches_are_crops() {
        let img = synthetic::natural(130, 140, 3);
        let set = patchify(&img).unwrap();
        for (p, &(r, c)) in set.patches().iter().zip(set.offsets()) {
            assert_eq!(p.shape(), (96, 96, 3));
            assert_eq!(p.plane(1).get(5, 7), img.plane(1).get(r + 5, c + 7));
        }
    }

    #[test]
    fn constant_patch_features() {
        let set = patchify(&Image::constant(96, 96, 1, 0.3).unwrap()).unwrap();
        let f = raw_features(&set).unwrap();
        assert!(f.row(0)[..64].iter().all(|&v| (v - 0.3).abs() < 1e-15));
        assert!(f.row(0)[64..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn random_patch_recomputation() {
        let img = synthetic::uniform_noise(96, 96, 1, 8);
        let f = raw_features(&patchify(&img).unwrap()).unwrap();
        let p = img.plane(0);
        let mut block = 0.0;
        for r in 12..24 {
            for c in 36..48 {
                block += p.get(r, c);
            }
        }
        assert!((f.row(0)[8 + 3] - block / 144.0).abs() < 1e-12);
        let mut hist = [0.0; 4];
        for r in 0..95 {
            for c in 0..95 {
                let gx = p.get(r, c + 1) - p.get(r, c);
                let gy = p.get(r + 1, c) - p.get(r, c);
                let mut deg = gy.atan2(gx).to_degrees();
                if deg < 0.0 {
                    deg += 180.0;
                }
                if deg >= 180.0 {
                    deg -= 180.0;
                }
                let bin = ((deg / 45.0).floor() as usize).min(3);
                hist[bin] += (gx * gx + gy * gy).sqrt();
            }
        }
        for (b, h) in hist.iter().enumerate() {
            assert!((f.row(0)[64 + b] - h / (95.0 * 95.0)).abs() < 1e-12);
        }
    }
}
