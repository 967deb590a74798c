//! Full-reference metrics: each maps a (reference, distorted) image pair to
//! a scalar [`FrScore`].
//!
//! Conventions shared by every metric here:
//!
//! * Both images must have the same height, width and channel count.
//! * Luminance-only metrics reduce RGB input with BT.601 luma. SSIM and
//!   MS-SSIM instead average the per-channel scores.
//! * Minimum sizes are enforced, never worked around by dropping scales.
//!
//! | metric | constants | source |
//! |---|---|---|
//! | SSIM | 11×11 Gaussian σ=1.5, C1=0.01², C2=0.03² | Wang et al. 2004 |
//! | MS-SSIM | weights 0.0448 0.2856 0.3001 0.2363 0.1333 | Wang et al. 2003 |
//! | IW-SSIM | 7×7 window, σ_n²=0.4, 3×3 blocks + parent | Wang & Li 2011 |
//! | VIFp | σ_n²=2, 4 scales, windows 17/9/5/3 | Sheikh & Bovik 2006 |
//! | GMSD | c=170/255², Prewitt | Xue et al. 2014 |
//! | MS-GMSD(c) | weights 0.096 0.596 0.289 0.019, α=0.5, β=(0.01, 0.32, 15) | Zhang et al. 2017 |
//! | FSIM(c) | T1=0.85 T2=160 T3=T4=200 λ=0.03 | Zhang et al. 2011 |
//! | SR-SIM(c) | C1=0.40 C2=225 α=0.5 | Zhang & Li 2012 |
//! | VSI | C1=1.27 C2=386 C3=130 α=0.4 β=0.02 | Zhang et al. 2014 |
//! | MDSI | C1=140 C2=55 C3=550 α=0.6 ρ=1 q=0.25 o=0.25 | Nafchi et al. 2016 |
//! | HaarPSI | C=30 α=4.2 | Reisenhofer et al. 2018 |
//! | DSS | DC c=1000, AC c=300, 3×3 σ=1.5, 5% pooling | Balanov et al. 2015 |

mod dss;
mod fsim;
mod gmsd;
mod haarpsi;
mod iw_ssim;
mod mdsi;
mod psnr;
mod srsim;
mod ssim;
mod vif;
mod vsi;

pub use dss::{dss, subband_similarity};
pub use fsim::fsim;
pub use gmsd::{gms_map, gmsd, ms_gmsd};
pub use haarpsi::{haar_responses, haarpsi};
pub use iw_ssim::{iw_ssim, iw_ssim_with, IwWeighting};
pub use mdsi::{deviation_pool, mdsi};
pub use psnr::{psnr, PSNR_CAP};
pub use srsim::{spectral_residual_saliency, sr_sim};
pub use ssim::{ms_ssim, ssim, ssim_components, ssim_map, SsimComponents};
pub use vif::vifp;
pub use vsi::{sdsp_saliency, vsi};

use crate::error::{IqaError, Result};
use crate::image::{Image, Plane};

/// A full-reference score together with its orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrScore {
    pub value: f64,
    /// Score of an image compared with itself.
    pub perfect_value: f64,
    pub higher_is_better: bool,
}

impl FrScore {
    pub(crate) fn similarity(value: f64) -> Result<Self> {
        Self::checked(value, 1.0, true)
    }

    pub(crate) fn deviation(value: f64) -> Result<Self> {
        Self::checked(value, 0.0, false)
    }

    pub(crate) fn checked(value: f64, perfect_value: f64, higher_is_better: bool) -> Result<Self> {
        if !value.is_finite() {
            return Err(IqaError::NonFinite("full-reference score"));
        }
        Ok(Self {
            value,
            perfect_value,
            higher_is_better,
        })
    }
}

/// Per-scale weights (or exponents) of a multi-scale metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleWeights(Vec<f64>);

impl ScaleWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(IqaError::InvalidArgument(
                "scale weights must be positive and non-empty".into(),
            ));
        }
        Ok(Self(weights))
    }

    /// MS-SSIM / IW-SSIM exponents for five scales.
    pub fn ms_ssim() -> Self {
        Self(vec![0.0448, 0.2856, 0.3001, 0.2363, 0.1333])
    }

    /// MS-GMSD weights for four scales.
    pub fn ms_gmsd() -> Self {
        Self(vec![0.096, 0.596, 0.289, 0.019])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_pair(
    reference: &Image,
    distorted: &Image,
    what: &'static str,
    min_side: usize,
) -> Result<()> {
    if reference.shape() != distorted.shape() {
        return Err(IqaError::DimensionMismatch(
            reference.shape(),
            distorted.shape(),
        ));
    }
    let (h, w, _) = reference.shape();
    if h < min_side || w < min_side {
        return Err(IqaError::TooSmall {
            what,
            min_height: min_side,
            min_width: min_side,
            height: h,
            width: w,
        });
    }
    Ok(())
}

/// `(2ab + c) / (a² + b² + c)` per pixel.
pub fn similarity_map(a: &Plane, b: &Plane, c: f64) -> Plane {
    a.zip_map(b, |x, y| (2.0 * x * y + c) / (x * x + y * y + c))
}

/// Weighted mean of `values`; falls back to the plain mean when every
/// weight is zero (e.g. both inputs flat).
pub(crate) fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Real part of `z^λ` for real `z`, i.e. `|z|^λ cos(λπ)` when `z < 0`.
pub(crate) fn real_power(z: f64, lambda: f64) -> f64 {
    if z >= 0.0 {
        z.powf(lambda)
    } else {
        (-z).powf(lambda) * (lambda * std::f64::consts::PI).cos()
    }
}

/// True when the image has one channel or three identical ones.
pub(crate) fn is_achromatic(img: &Image) -> bool {
    img.channels() == 1 || (img.plane(0) == img.plane(1) && img.plane(1) == img.plane(2))
}

pub(crate) fn scale255(p: &Plane) -> Plane {
    p.map(|v| v * 255.0)
}
