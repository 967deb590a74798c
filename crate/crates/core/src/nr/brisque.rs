use std::sync::OnceLock;

use statrs::function::gamma::gamma;

use super::BrisqueModel;
use crate::error::{IqaError, Result};
use crate::filter::{convolve2d, Kernel2D, Padding};
use crate::image::{Image, Plane};
use crate::pyramid::avg_pool2;

pub const BRISQUE_FEATURES: usize = 36;
pub const BRISQUE_MIN_SIDE: usize = 32;

const ALPHA_MIN: f64 = 0.2;
const ALPHA_STEP: f64 = 0.001;
const ALPHA_COUNT: usize = 9801;

/// `(row shift, column shift)` pairs: horizontal, vertical, main diagonal,
/// anti-diagonal neighbours.
const SHIFTS: [(isize, isize); 4] = [(0, 1), (1, 0), (1, 1), (-1, 1)];

/// The 36 BRISQUE statistics, 18 per scale (full, then half resolution).
///
/// Per scale: GGD `(α, σ²)` of the MSCN map, then for each of the four
/// neighbour products the AGGD `(α, mean, σl², σr²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrisqueFeatures([f64; BRISQUE_FEATURES]);

impl BrisqueFeatures {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The 18 values of scale 0 (full) or 1 (half).
    pub fn scale(&self, scale: usize) -> &[f64] {
        &self.0[scale * 18..(scale + 1) * 18]
    }
}

/// Mean subtracted contrast normalized coefficients `(I − μ) / (σ + 1)`.
///
/// Samples are rescaled to `[0, 255]`; μ and σ come from a 7×7 Gaussian
/// window with σ = 7/6 and reflect padding.
pub fn mscn_coefficients(plane: &Plane) -> Result<Plane> {
    let x = plane.map(|v| v * 255.0);
    let window = Kernel2D::gaussian(7, 7.0 / 6.0)?;
    let mu = convolve2d(&x, &window, Padding::Reflect)?;
    let sq = convolve2d(&x.map(|v| v * v), &window, Padding::Reflect)?;
    Ok(Plane::from_fn(x.height(), x.width(), |r, c| {
        let m = mu.get(r, c);
        let sigma = (sq.get(r, c) - m * m).abs().sqrt();
        (x.get(r, c) - m) / (sigma + 1.0)
    }))
}

struct RatioTable {
    /// `Γ(2/α)² / (Γ(1/α) Γ(3/α))` at every grid α
    ratio: Vec<f64>,
}

fn table() -> &'static RatioTable {
    static TABLE: OnceLock<RatioTable> = OnceLock::new();
    TABLE.get_or_init(|| RatioTable {
        ratio: (0..ALPHA_COUNT)
            .map(|i| {
                let a = grid_alpha(i);
                gamma(2.0 / a).powi(2) / (gamma(1.0 / a) * gamma(3.0 / a))
            })
            .collect(),
    })
}

fn grid_alpha(i: usize) -> f64 {
    ALPHA_MIN + ALPHA_STEP * i as f64
}

/// Grid α whose ratio is closest to `target`; the first (smallest) wins ties.
fn lookup_alpha(target: f64) -> f64 {
    let mut best = (f64::INFINITY, 0);
    for (i, r) in table().ratio.iter().enumerate() {
        let d = (r - target).abs();
        if d < best.0 {
            best = (d, i);
        }
    }
    grid_alpha(best.1)
}

/// Moment-matching generalized Gaussian fit; returns `(α, σ²)`.
pub fn fit_ggd(samples: &[f64]) -> Result<(f64, f64)> {
    let n = samples.len() as f64;
    let sigma_sq = samples.iter().map(|v| v * v).sum::<f64>() / n;
    let e_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    if samples.is_empty() || sigma_sq <= 0.0 || !sigma_sq.is_finite() {
        return Err(IqaError::Degenerate(
            "GGD fit of a zero-variance field".into(),
        ));
    }
    Ok((lookup_alpha(e_abs * e_abs / sigma_sq), sigma_sq))
}

/// Asymmetric generalized Gaussian fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggdFit {
    pub alpha: f64,
    pub left_std: f64,
    pub right_std: f64,
}

impl AggdFit {
    /// Mean of the fitted distribution.
    pub fn mean(&self) -> f64 {
        let a = self.alpha;
        (self.right_std - self.left_std)
            * (gamma(2.0 / a) / gamma(1.0 / a))
            * (gamma(1.0 / a) / gamma(3.0 / a)).sqrt()
    }
}

/// Moment-matching AGGD fit with separate left/right spreads.
pub fn fit_aggd(samples: &[f64]) -> Result<AggdFit> {
    let side = |pred: fn(f64) -> bool| {
        let (sum, count) = samples
            .iter()
            .filter(|v| pred(**v))
            .fold((0.0, 0usize), |(s, c), v| (s + v * v, c + 1));
        if count == 0 {
            0.0
        } else {
            (sum / count as f64).sqrt()
        }
    };
    let left_std = side(|v| v < 0.0);
    let right_std = side(|v| v > 0.0);
    let n = samples.len() as f64;
    let mean_sq = samples.iter().map(|v| v * v).sum::<f64>() / n;
    if samples.is_empty() || right_std <= 0.0 || mean_sq <= 0.0 {
        return Err(IqaError::Degenerate(
            "AGGD fit needs positive samples and non-zero variance".into(),
        ));
    }
    let g = left_std / right_std;
    let e_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let r_hat = e_abs * e_abs / mean_sq;
    let r_norm = r_hat * (g.powi(3) + 1.0) * (g + 1.0) / (g * g + 1.0).powi(2);
    Ok(AggdFit {
        alpha: lookup_alpha(r_norm),
        left_std,
        right_std,
    })
}

fn scale_features(mscn: &Plane, out: &mut Vec<f64>) -> Result<()> {
    let (alpha, sigma_sq) = fit_ggd(mscn.data())?;
    out.extend([alpha, sigma_sq]);
    let (h, w) = (mscn.height() as isize, mscn.width() as isize);
    for (dr, dc) in SHIFTS {
        // circular shift: the neighbour of (r, c) is (r - dr, c - dc) mod size
        let products: Vec<f64> = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| {
                let (sr, sc) = ((r - dr).rem_euclid(h), (c - dc).rem_euclid(w));
                mscn.get(r as usize, c as usize) * mscn.get(sr as usize, sc as usize)
            })
            .collect();
        let fit = fit_aggd(&products)?;
        out.extend([
            fit.alpha,
            fit.mean(),
            fit.left_std.powi(2),
            fit.right_std.powi(2),
        ]);
    }
    Ok(())
}

/// BRISQUE statistics of the luma at full and half resolution.
pub fn brisque_features(img: &Image) -> Result<BrisqueFeatures> {
    let (h, w) = (img.height(), img.width());
    if h < BRISQUE_MIN_SIDE || w < BRISQUE_MIN_SIDE {
        return Err(IqaError::TooSmall {
            what: "BRISQUE",
            min_height: BRISQUE_MIN_SIDE,
            min_width: BRISQUE_MIN_SIDE,
            height: h,
            width: w,
        });
    }
    let luma = img.luma();
    let mut values = Vec::with_capacity(BRISQUE_FEATURES);
    scale_features(&mscn_coefficients(&luma)?, &mut values)?;
    scale_features(&mscn_coefficients(&avg_pool2(&luma)?)?, &mut values)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(IqaError::NonFinite("BRISQUE features"));
    }
    Ok(BrisqueFeatures(values.try_into().expect("36 features")))
}

/// SVR quality prediction for precomputed features; lower is better.
pub fn brisque_score(features: &BrisqueFeatures, model: &BrisqueModel) -> Result<f64> {
    model.predict(features.as_slice())
}

/// Features and score in one call.
pub fn brisque(img: &Image, model: &BrisqueModel) -> Result<f64> {
    brisque_score(&brisque_features(img)?, model)
}
