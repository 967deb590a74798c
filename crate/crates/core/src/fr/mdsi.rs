use rustfft::num_complex::Complex64;

use super::{check_pair, scale255, similarity_map, FrScore};
use crate::error::Result;
use crate::filter::{gradient_magnitude, GradientOperator};
use crate::image::{lmn_of, Image, Plane};
use crate::pyramid::viewing_distance_downsample;

const C1: f64 = 140.0;
const C2: f64 = 55.0;
const C3: f64 = 550.0;
const ALPHA: f64 = 0.6;
const RHO: f64 = 1.0;
const Q: f64 = 0.25;
const O: f64 = 0.25;

pub const MDSI_MIN_SIDE: usize = 3;

/// Deviation pooling: `(mean |z^q - mean(z^q)|^ρ)^(o/ρ)` with the complex
/// power taken on the principal branch, so negative map values are allowed.
pub fn deviation_pool(values: &[f64], q: f64, rho: f64, o: f64) -> f64 {
    let powered: Vec<Complex64> = values
        .iter()
        .map(|&v| {
            if v >= 0.0 {
                Complex64::new(v.powf(q), 0.0)
            } else {
                Complex64::from_polar((-v).powf(q), q * std::f64::consts::PI)
            }
        })
        .collect();
    let n = powered.len() as f64;
    let mean = powered.iter().sum::<Complex64>() / n;
    let dev = powered
        .iter()
        .map(|z| (z - mean).norm().powf(rho))
        .sum::<f64>()
        / n;
    dev.powf(o / rho)
}

/// Mean deviation similarity index: gradient similarity against a fused
/// image plus LMN chroma similarity, summed and deviation-pooled. 0 is perfect.
pub fn mdsi(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "MDSI", MDSI_MIN_SIDE)?;
    let prepare = |img: &Image| -> Result<[Plane; 3]> {
        let [r, g, b] = img.to_rgb_planes();
        let lmn = lmn_of(&r, &g, &b);
        let planes = [img.luma(), lmn.m, lmn.n];
        let mut out = planes.map(|p| scale255(&p));
        for p in out.iter_mut() {
            *p = viewing_distance_downsample(p)?;
        }
        Ok(out)
    };
    let [l1, h1, m1] = prepare(reference)?;
    let [l2, h2, m2] = prepare(distorted)?;
    let fused = l1.zip_map(&l2, |a, b| 0.5 * (a + b));
    let g1 = gradient_magnitude(&l1, GradientOperator::Prewitt)?;
    let g2 = gradient_magnitude(&l2, GradientOperator::Prewitt)?;
    let gf = gradient_magnitude(&fused, GradientOperator::Prewitt)?;
    let gs12 = similarity_map(&g1, &g2, C1);
    let gs13 = similarity_map(&g1, &gf, C2);
    let gs23 = similarity_map(&g2, &gf, C2);
    let n = l1.len();
    let gcs: Vec<f64> = (0..n)
        .map(|k| {
            let gs = gs12.data()[k] + gs23.data()[k] - gs13.data()[k];
            let (a, b, c, d) = (h1.data()[k], h2.data()[k], m1.data()[k], m2.data()[k]);
            let cs = (2.0 * (a * b + c * d) + C3) / (a * a + b * b + c * c + d * d + C3);
            ALPHA * gs + (1.0 - ALPHA) * cs
        })
        .collect();
    FrScore::deviation(deviation_pool(&gcs, Q, RHO, O))
}
