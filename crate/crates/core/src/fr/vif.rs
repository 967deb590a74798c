use super::{check_pair, scale255, FrScore};
use crate::error::Result;
use crate::filter::{convolve2d, Kernel2D, Padding};
use crate::image::{Image, Plane};

const SIGMA_N_SQ: f64 = 2.0;
const EPS: f64 = 1e-10;

/// Smallest side for which all four scales keep a non-empty valid region.
pub const VIFP_MIN_SIDE: usize = 41;

/// Pixel-domain visual information fidelity over four scales.
///
/// Directional: the reference image supplies the source model.
pub fn vifp(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "VIFp", VIFP_MIN_SIDE)?;
    let mut x = scale255(&reference.luma());
    let mut y = scale255(&distorted.luma());
    let (mut num, mut den) = (0.0, 0.0);
    for scale in 0..4 {
        let size = (1usize << (4 - scale)) + 1;
        let window = Kernel2D::gaussian(size, size as f64 / 5.0)?;
        if scale > 0 {
            let decimate = |p: &Plane| -> Result<Plane> {
                let f = convolve2d(p, &window, Padding::Valid)?;
                Ok(Plane::from_fn(
                    f.height().div_ceil(2),
                    f.width().div_ceil(2),
                    |r, c| f.get(2 * r, 2 * c),
                ))
            };
            x = decimate(&x)?;
            y = decimate(&y)?;
        }
        let blur = |p: &Plane| convolve2d(p, &window, Padding::Valid);
        let mu_x = blur(&x)?;
        let mu_y = blur(&y)?;
        let xx = blur(&x.zip_map(&x, |a, b| a * b))?;
        let yy = blur(&y.zip_map(&y, |a, b| a * b))?;
        let xy = blur(&x.zip_map(&y, |a, b| a * b))?;
        for k in 0..mu_x.len() {
            let (mx, my) = (mu_x.data()[k], mu_y.data()[k]);
            let mut sx = (xx.data()[k] - mx * mx).max(0.0);
            let sy = (yy.data()[k] - my * my).max(0.0);
            let sxy = xy.data()[k] - mx * my;

            let mut g = sxy / (sx + EPS);
            let mut sv = sy - g * sxy;
            if sx < EPS {
                g = 0.0;
                sv = sy;
                sx = 0.0;
            }
            if sy < EPS {
                g = 0.0;
                sv = 0.0;
            }
            if g < 0.0 {
                sv = sy;
                g = 0.0;
            }
            let sv = sv.max(EPS);
            num += (1.0 + g * g * sx / (sv + SIGMA_N_SQ)).log10();
            den += (1.0 + sx / SIGMA_N_SQ).log10();
        }
    }
    FrScore::similarity((num + EPS) / (den + EPS))
}
