use super::{check_pair, FrScore};
use crate::dct::dct2_blocks;
use crate::error::Result;
use crate::filter::{convolve2d, Kernel2D, Padding};
use crate::image::{Image, Plane};

const BLOCK: usize = 8;
const SIGMA_WEIGHT: f64 = 1.55;
const WEIGHT_FLOOR: f64 = 1e-2;
const C_DC: f64 = 1000.0;
const C_AC: f64 = 300.0;
const PERCENTILE: f64 = 0.05;

pub const DSS_MIN_SIDE: usize = 16;

/// Mean of the smallest `max(1, round(5% · n))` entries.
fn worst_mean(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let k = ((PERCENTILE * values.len() as f64).round() as usize).clamp(1, values.len());
    values[..k].iter().sum::<f64>() / k as f64
}

/// Similarity of one pair of DCT subband planes.
///
/// Local variances come from a 3×3 Gaussian (σ = 1.5) with reflect padding.
/// The variance-similarity map is pooled over its worst 5%; for the DC band
/// (`dc = true`) the same pooling of the covariance term multiplies in.
pub fn subband_similarity(x: &Plane, y: &Plane, dc: bool) -> Result<f64> {
    let c = if dc { C_DC } else { C_AC };
    let kernel = Kernel2D::gaussian(3, 1.5)?;
    let blur = |p: &Plane| convolve2d(p, &kernel, Padding::Reflect);
    let mu_x = blur(x)?;
    let mu_y = blur(y)?;
    let xx = blur(&x.zip_map(x, |a, b| a * b))?;
    let yy = blur(&y.zip_map(y, |a, b| a * b))?;
    let n = x.len();
    let var = |k: usize, sq: &Plane, mu: &Plane| (sq.data()[k] - mu.data()[k].powi(2)).max(0.0);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let xy = if dc {
        Some(blur(&x.zip_map(y, |a, b| a * b))?)
    } else {
        None
    };
    for k in 0..n {
        let (sx, sy) = (var(k, &xx, &mu_x), var(k, &yy, &mu_y));
        let cross = (sx * sy).sqrt();
        left.push((2.0 * cross + c) / (sx + sy + c));
        if let Some(xy) = &xy {
            let sxy = xy.data()[k] - mu_x.data()[k] * mu_y.data()[k];
            right.push((sxy + c) / (cross + c));
        }
    }
    let mut sim = worst_mean(&mut left);
    if dc {
        sim *= worst_mean(&mut right);
    }
    Ok(sim)
}

fn subband_weight(u: usize, v: usize) -> f64 {
    let (a, b) = (u as f64 + 0.5, v as f64 + 0.5);
    let w = (-(a * a + b * b) / (2.0 * SIGMA_WEIGHT * SIGMA_WEIGHT)).exp();
    if w < WEIGHT_FLOOR {
        0.0
    } else {
        w
    }
}

/// DCT subband similarity over 8×8 blocks of the luma, pooled with
/// Gaussian weights that favour low frequencies.
pub fn dss(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "DSS", DSS_MIN_SIDE)?;
    let x = dct2_blocks(&reference.luma().map(|v| v * 255.0), BLOCK)?;
    let y = dct2_blocks(&distorted.luma().map(|v| v * 255.0), BLOCK)?;
    let (mut num, mut den) = (0.0, 0.0);
    for u in 0..BLOCK {
        for v in 0..BLOCK {
            let w = subband_weight(u, v);
            if w == 0.0 {
                continue;
            }
            num += w * subband_similarity(&x.subband(u, v), &y.subband(u, v), u == 0 && v == 0)?;
            den += w;
        }
    }
    FrScore::similarity(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn identity() {
        let img = synthetic::natural(64, 48, 3);
        assert!((dss(&img, &img).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dc_band_matches_local_variance_oracle() {
        let a = synthetic::natural(64, 64, 1);
        let b = synthetic::with_gaussian_noise(&a, 0.1, 7);
        let dc = |img: &Image| {
            dct2_blocks(&img.plane(0).map(|v| v * 255.0), 8)
                .unwrap()
                .subband(0, 0)
        };
        let (x, y) = (dc(&a), dc(&b));
        // block DC of an orthonormal 8×8 DCT is 8 × block mean
        assert!((x.get(1, 2) - 8.0 * 255.0 * a.plane(0).crop(8, 16, 8, 8).mean()).abs() < 1e-9);

        let g: Vec<f64> = {
            let e: Vec<f64> = (-1..=1)
                .map(|i: i32| (-(i * i) as f64 / 4.5).exp())
                .collect();
            let s: f64 = e.iter().sum();
            e.iter().map(|v| v / s).collect()
        };
        let at = |p: &Plane, r: isize, c: isize| {
            let m = |i: isize| {
                if i < 0 {
                    -i
                } else if i >= 8 {
                    14 - i
                } else {
                    i
                }
            };
            p.get(m(r) as usize, m(c) as usize)
        };
        let stat = |p: &Plane, q: &Plane, r: isize, c: isize| {
            let (mut mp, mut mq, mut pq) = (0.0, 0.0, 0.0);
            for i in -1..=1isize {
                for j in -1..=1isize {
                    let w = g[(i + 1) as usize] * g[(j + 1) as usize];
                    mp += w * at(p, r + i, c + j);
                    mq += w * at(q, r + i, c + j);
                    pq += w * at(p, r + i, c + j) * at(q, r + i, c + j);
                }
            }
            pq - mp * mq
        };
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for r in 0..8 {
            for c in 0..8 {
                let sx = stat(&x, &x, r, c).max(0.0);
                let sy = stat(&y, &y, r, c).max(0.0);
                let sxy = stat(&x, &y, r, c);
                left.push((2.0 * (sx * sy).sqrt() + 1000.0) / (sx + sy + 1000.0));
                right.push((sxy + 1000.0) / ((sx * sy).sqrt() + 1000.0));
            }
        }
        left.sort_by(f64::total_cmp);
        right.sort_by(f64::total_cmp);
        // 5% of 64 rounds to 3
        let expected = left[..3].iter().sum::<f64>() / 3.0 * right[..3].iter().sum::<f64>() / 3.0;
        let got = subband_similarity(&x, &y, true).unwrap();
        assert!(got < 1.0);
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn weights_drop_high_frequencies() {
        assert!(subband_weight(0, 0) > subband_weight(1, 0));
        assert_eq!(subband_weight(7, 7), 0.0);
        assert_eq!(subband_weight(3, 3), 0.0);
        assert!(subband_weight(2, 3) > 0.0);
    }

    #[test]
    fn noise_lowers_score() {
        let a = synthetic::natural(96, 96, 1);
        let mild = dss(&a, &synthetic::with_gaussian_noise(&a, 0.02, 2))
            .unwrap()
            .value;
        let heavy = dss(&a, &synthetic::with_gaussian_noise(&a, 0.2, 2))
            .unwrap()
            .value;
        assert!(heavy < mild && mild < 1.0);
    }
}
