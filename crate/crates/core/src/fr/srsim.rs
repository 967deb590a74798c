use super::{
    check_pair, is_achromatic, real_power, scale255, similarity_map, weighted_mean, FrScore,
};
use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::fft::{fft2, ifft2, ComplexField};
use crate::filter::{convolve2d, gradient_magnitude, GradientOperator, Kernel2D, Padding};
use crate::image::{Image, Plane};
use crate::pyramid::{resize_bilinear, viewing_distance_downsample};

const C1: f64 = 0.40;
const C2: f64 = 225.0;
const ALPHA: f64 = 0.5;
const T_CHROMA: f64 = 200.0;
const LAMBDA: f64 = 0.03;
const SALIENCY_SCALE: f64 = 0.25;

pub const SR_SIM_MIN_SIDE: usize = 8;

/// Spectral-residual saliency in `[0, 1]`, same size as the input.
///
/// The plane is shrunk to a quarter, the log-amplitude spectrum is reduced by
/// its 3×3 local mean, and the inverse transform energy is blurred and
/// rescaled to `[0, 1]`. A flat result maps to all zeros.
pub fn spectral_residual_saliency(plane: &Plane) -> Result<Plane> {
    let (h, w) = plane.dims();
    let sh = ((h as f64 * SALIENCY_SCALE).ceil() as usize).max(1);
    let sw = ((w as f64 * SALIENCY_SCALE).ceil() as usize).max(1);
    let small = resize_bilinear(plane, sh, sw);
    let spectrum = fft2(&ComplexField::from_real(&small));
    let log_amp = Plane::new(
        sh,
        sw,
        spectrum
            .data()
            .iter()
            .map(|z| (z.norm() + f64::EPSILON).ln())
            .collect(),
    )?;
    let local = convolve2d(&log_amp, &Kernel2D::boxcar(3)?, Padding::Replicate)?;
    let residual = ComplexField::new(
        sh,
        sw,
        spectrum
            .data()
            .iter()
            .zip(log_amp.data().iter().zip(local.data()))
            .map(|(z, (l, m))| Complex64::from_polar((l - m).exp(), z.arg()))
            .collect(),
    );
    let energy = ifft2(&residual).norm().map(|v| v * v);
    let blurred = convolve2d(&energy, &Kernel2D::gaussian(11, 3.8)?, Padding::Zero)?;
    let (lo, hi) = (blurred.min(), blurred.max());
    let normalized = if hi > lo {
        blurred.map(|v| (v - lo) / (hi - lo))
    } else {
        Plane::zeros(sh, sw)
    };
    Ok(resize_bilinear(&normalized, h, w))
}

/// Spectral-residual saliency similarity combined with gradient similarity,
/// pooled with `max(VS₁, VS₂)` weights. `chromatic` adds the YIQ chroma term.
pub fn sr_sim(reference: &Image, distorted: &Image, chromatic: bool) -> Result<FrScore> {
    check_pair(reference, distorted, "SR-SIM", SR_SIM_MIN_SIDE)?;
    let prepare = |img: &Image| -> Result<[Plane; 3]> {
        let planes = if img.channels() == 3 {
            let yiq = crate::image::rgb_to_yiq(img)?;
            [yiq.y, yiq.i, yiq.q]
        } else {
            let z = Plane::zeros(img.height(), img.width());
            [img.plane(0).clone(), z.clone(), z]
        };
        let mut out = planes.map(|p| scale255(&p));
        for p in out.iter_mut() {
            *p = viewing_distance_downsample(p)?;
        }
        Ok(out)
    };
    let x = prepare(reference)?;
    let y = prepare(distorted)?;
    let vs1 = spectral_residual_saliency(&x[0])?;
    let vs2 = spectral_residual_saliency(&y[0])?;
    let g1 = gradient_magnitude(&x[0], GradientOperator::Scharr)?;
    let g2 = gradient_magnitude(&y[0], GradientOperator::Scharr)?;
    let svs = similarity_map(&vs1, &vs2, C1);
    let sg = similarity_map(&g1, &g2, C2);
    let mut sim = svs.zip_map(&sg, |a, b| a * b.powf(ALPHA));
    if chromatic && !(is_achromatic(reference) && is_achromatic(distorted)) {
        let si = similarity_map(&x[1], &y[1], T_CHROMA);
        let sq = similarity_map(&x[2], &y[2], T_CHROMA);
        let c = si.zip_map(&sq, |i, q| real_power(i * q, LAMBDA));
        sim = sim.zip_map(&c, |a, b| a * b);
    }
    let weights = vs1.zip_map(&vs2, f64::max);
    FrScore::similarity(weighted_mean(sim.data(), weights.data()))
}
