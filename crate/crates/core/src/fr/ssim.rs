use super::{check_pair, FrScore, ScaleWeights};
use crate::error::Result;
use crate::filter::{convolve2d, Kernel2D, Padding};
use crate::image::{Image, Plane};
use crate::pyramid::{avg_pool2, viewing_distance_downsample};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Smallest side accepted by [`ms_ssim`]: the 11-tap window must fit at the
/// fifth scale.
pub const MS_SSIM_MIN_SIDE: usize = 16 * WINDOW;

/// Local SSIM terms over the valid region of the window.
#[derive(Clone, Debug)]
pub struct SsimComponents {
    /// Luminance comparison `(2 μx μy + C1) / (μx² + μy² + C1)`.
    pub luminance: Plane,
    /// Contrast-structure comparison `(2 σxy + C2) / (σx² + σy² + C2)`.
    pub contrast_structure: Plane,
}

impl SsimComponents {
    pub fn ssim_map(&self) -> Plane {
        self.luminance
            .zip_map(&self.contrast_structure, |l, cs| l * cs)
    }
}

/// SSIM luminance and contrast-structure maps of two planes (data range 1).
pub fn ssim_components(x: &Plane, y: &Plane) -> Result<SsimComponents> {
    let window = Kernel2D::gaussian(WINDOW, SIGMA)?;
    let blur = |p: &Plane| convolve2d(p, &window, Padding::Valid);
    let mu_x = blur(x)?;
    let mu_y = blur(y)?;
    let xx = blur(&x.zip_map(x, |a, b| a * b))?;
    let yy = blur(&y.zip_map(y, |a, b| a * b))?;
    let xy = blur(&x.zip_map(y, |a, b| a * b))?;
    let (c1, c2) = (K1 * K1, K2 * K2);
    let n = mu_x.len();
    let mut lum = Vec::with_capacity(n);
    let mut cs = Vec::with_capacity(n);
    for k in 0..n {
        let (mx, my) = (mu_x.data()[k], mu_y.data()[k]);
        let sx = xx.data()[k] - mx * mx;
        let sy = yy.data()[k] - my * my;
        let sxy = xy.data()[k] - mx * my;
        lum.push((2.0 * mx * my + c1) / (mx * mx + my * my + c1));
        cs.push((2.0 * sxy + c2) / (sx + sy + c2));
    }
    let (h, w) = mu_x.dims();
    Ok(SsimComponents {
        luminance: Plane::new(h, w, lum)?,
        contrast_structure: Plane::new(h, w, cs)?,
    })
}

/// Per-channel SSIM maps after viewing-distance downsampling.
pub fn ssim_map(reference: &Image, distorted: &Image) -> Result<Vec<Plane>> {
    check_pair(reference, distorted, "SSIM", WINDOW)?;
    reference
        .planes()
        .iter()
        .zip(distorted.planes())
        .map(|(x, y)| {
            let x = viewing_distance_downsample(x)?;
            let y = viewing_distance_downsample(y)?;
            Ok(ssim_components(&x, &y)?.ssim_map())
        })
        .collect()
}

/// Mean SSIM, averaged over channels for RGB input.
pub fn ssim(reference: &Image, distorted: &Image) -> Result<FrScore> {
    let maps = ssim_map(reference, distorted)?;
    let value = maps.iter().map(Plane::mean).sum::<f64>() / maps.len() as f64;
    FrScore::similarity(value)
}

fn ms_ssim_plane(x: &Plane, y: &Plane, weights: &ScaleWeights) -> Result<f64> {
    let mut x = x.clone();
    let mut y = y.clone();
    let w = weights.as_slice();
    let mut value = 1.0;
    for (i, &wi) in w.iter().enumerate() {
        if i > 0 {
            x = avg_pool2(&x)?;
            y = avg_pool2(&y)?;
        }
        let comps = ssim_components(&x, &y)?;
        let term = if i + 1 == w.len() {
            comps.ssim_map().mean()
        } else {
            comps.contrast_structure.mean()
        };
        value *= term.max(0.0).powf(wi);
    }
    Ok(value)
}

/// Five-scale MS-SSIM; contrast-structure at every scale, luminance only at
/// the coarsest, combined as a weighted product.
pub fn ms_ssim(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "MS-SSIM", MS_SSIM_MIN_SIDE)?;
    let weights = ScaleWeights::ms_ssim();
    let mut total = 0.0;
    for (x, y) in reference.planes().iter().zip(distorted.planes()) {
        total += ms_ssim_plane(x, y, &weights)?;
    }
    FrScore::similarity(total / reference.channels() as f64)
}
