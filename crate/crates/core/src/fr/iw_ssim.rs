use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_pair, scale255, ssim::SsimComponents, weighted_mean, FrScore, ScaleWeights};
use crate::error::Result;
use crate::filter::{convolve2d, Kernel2D, Padding};
use crate::image::{Image, Plane};

const WINDOW: usize = 7;
const SIGMA: f64 = 1.5;
const C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);
const SIGMA_NSQ: f64 = 0.4;

/// The coarsest band must still hold one 7×7 window.
pub const IW_SSIM_MIN_SIDE: usize = (WINDOW - 1) * 16 + 1;

/// How contrast-structure maps are pooled at the four finest scales.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IwWeighting {
    /// Information-content weights from the Gaussian scale-mixture model.
    #[default]
    Information,
    /// Every pixel weighted equally (plain mean).
    Uniform,
}

fn binomial5() -> Kernel2D {
    let b: Vec<f64> = [1.0, 4.0, 6.0, 4.0, 1.0].iter().map(|v| v / 16.0).collect();
    Kernel2D::separable(b.clone(), b).expect("5x5 kernel")
}

fn reduce(x: &Plane, k: &Kernel2D) -> Result<Plane> {
    let blurred = convolve2d(x, k, Padding::Reflect)?;
    let (h, w) = x.dims();
    Ok(Plane::from_fn(h.div_ceil(2), w.div_ceil(2), |r, c| {
        blurred.get(2 * r, 2 * c)
    }))
}

fn expand(lo: &Plane, height: usize, width: usize, k: &Kernel2D) -> Result<Plane> {
    let (h, w) = lo.dims();
    let mut up = Plane::zeros(2 * h, 2 * w);
    for r in 0..h {
        for c in 0..w {
            up.set(2 * r, 2 * c, 4.0 * lo.get(r, c));
        }
    }
    Ok(convolve2d(&up, k, Padding::Reflect)?.crop(0, 0, height, width))
}

/// Laplacian pyramid: `levels - 1` band-pass levels plus the low-pass residual.
fn laplacian_pyramid(x: &Plane, levels: usize) -> Result<Vec<Plane>> {
    let k = binomial5();
    let mut bands = Vec::with_capacity(levels);
    let mut current = x.clone();
    for _ in 0..levels - 1 {
        let lo = reduce(&current, &k)?;
        let up = expand(&lo, current.height(), current.width(), &k)?;
        bands.push(current.zip_map(&up, |a, b| a - b));
        current = lo;
    }
    bands.push(current);
    Ok(bands)
}

fn box3_sum(p: &Plane) -> Result<Plane> {
    let k = Kernel2D::separable(vec![1.0; 3], vec![1.0; 3])?;
    convolve2d(p, &k, Padding::Zero)
}

/// Per-pixel information content of the reference band under the GSM
/// model, over the interior `(h-2) × (w-2)` region.
fn info_content(x: &Plane, y: &Plane, parent: Option<&Plane>) -> Result<Plane> {
    const BLK: f64 = 9.0;
    let sx = box3_sum(x)?;
    let sy = box3_sum(y)?;
    let sxx = box3_sum(&x.zip_map(x, |a, b| a * b))?;
    let syy = box3_sum(&y.zip_map(y, |a, b| a * b))?;
    let sxy = box3_sum(&x.zip_map(y, |a, b| a * b))?;
    let (h, w) = x.dims();
    let (ih, iw) = (h - 2, w - 2);

    let mut g = Vec::with_capacity(ih * iw);
    let mut vv = Vec::with_capacity(ih * iw);
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let (mx, my) = (sx.get(r, c) / BLK, sy.get(r, c) / BLK);
            let cov = sxy.get(r, c) - BLK * mx * my;
            let ssx = (sxx.get(r, c) - BLK * mx * mx).max(0.0);
            let ssy = (syy.get(r, c) - BLK * my * my).max(0.0);
            let (mut gain, mut var) =
                (cov / (ssx + 1e-10), (ssy - cov / (ssx + 1e-10) * cov) / BLK);
            if ssx < 1e-10 {
                gain = 0.0;
                var = ssy / BLK;
            }
            if ssy < 1e-10 {
                gain = 0.0;
                var = 0.0;
            }
            g.push(gain);
            vv.push(var);
        }
    }

    // neighborhood vectors: 3×3 reference coefficients (+ parent)
    let dim = 9 + usize::from(parent.is_some());
    let vector_at = |r: usize, c: usize, out: &mut [f64]| {
        let mut k = 0;
        for dr in 0..3 {
            for dc in 0..3 {
                out[k] = x.get(r + dr - 1, c + dc - 1);
                k += 1;
            }
        }
        if let Some(p) = parent {
            out[k] = p.get(r, c);
        }
    };
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut v = vec![0.0; dim];
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            vector_at(r, c, &mut v);
            for i in 0..dim {
                for j in i..dim {
                    cov[(i, j)] += v[i] * v[j];
                }
            }
        }
    }
    let n_exp = (ih * iw) as f64;
    for i in 0..dim {
        for j in i..dim {
            cov[(i, j)] /= n_exp;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    let eig = SymmetricEigen::new(cov);
    let lambdas: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let max_l = lambdas.iter().copied().fold(0.0, f64::max);
    // pseudo-inverse over the non-negligible spectrum
    let q = &eig.eigenvectors;
    let mut inv = DMatrix::<f64>::zeros(dim, dim);
    for (k, &l) in lambdas.iter().enumerate() {
        if l > 1e-12 * max_l.max(f64::MIN_POSITIVE) {
            let col = q.column(k);
            inv += (col * col.transpose()) / l;
        }
    }

    let nsq = SIGMA_NSQ;
    let mut out = Vec::with_capacity(ih * iw);
    let mut k = 0;
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            vector_at(r, c, &mut v);
            let mut ss = 0.0;
            for i in 0..dim {
                let mut t = 0.0;
                for j in 0..dim {
                    t += v[j] * inv[(j, i)];
                }
                ss += t * v[i];
            }
            ss /= dim as f64;
            let (gain, var) = (g[k], vv[k]);
            let mut info = 0.0;
            for &l in &lambdas {
                info += (1.0
                    + ((var + (1.0 + gain * gain) * nsq) * ss * l + nsq * var) / (nsq * nsq))
                    .log2();
            }
            out.push(if info < f64::EPSILON { 0.0 } else { info });
            k += 1;
        }
    }
    Plane::new(ih, iw, out)
}

fn contrast_structure(x: &Plane, y: &Plane, window: &Kernel2D) -> Result<SsimComponents> {
    let blur = |p: &Plane| convolve2d(p, window, Padding::Valid);
    let mu_x = blur(x)?;
    let mu_y = blur(y)?;
    let xx = blur(&x.zip_map(x, |a, b| a * b))?;
    let yy = blur(&y.zip_map(y, |a, b| a * b))?;
    let xy = blur(&x.zip_map(y, |a, b| a * b))?;
    let n = mu_x.len();
    let (mut lum, mut cs) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let (mx, my) = (mu_x.data()[k], mu_y.data()[k]);
        let sx = (xx.data()[k] - mx * mx).max(0.0);
        let sy = (yy.data()[k] - my * my).max(0.0);
        let sxy = xy.data()[k] - mx * my;
        lum.push((2.0 * mx * my + C1) / (mx * mx + my * my + C1));
        cs.push((2.0 * sxy + C2) / (sx + sy + C2));
    }
    let (h, w) = mu_x.dims();
    Ok(SsimComponents {
        luminance: Plane::new(h, w, lum)?,
        contrast_structure: Plane::new(h, w, cs)?,
    })
}

/// IW-SSIM with the requested pooling at the band-pass scales.
pub fn iw_ssim_with(
    reference: &Image,
    distorted: &Image,
    weighting: IwWeighting,
) -> Result<FrScore> {
    check_pair(reference, distorted, "IW-SSIM", IW_SSIM_MIN_SIDE)?;
    let weights = ScaleWeights::ms_ssim();
    let levels = weights.len();
    let x = scale255(&reference.luma());
    let y = scale255(&distorted.luma());
    let px = laplacian_pyramid(&x, levels)?;
    let py = laplacian_pyramid(&y, levels)?;
    let window = Kernel2D::gaussian(WINDOW, SIGMA)?;
    let k5 = binomial5();

    let mut value = 1.0;
    for (s, &ws) in weights.as_slice().iter().enumerate() {
        let comps = contrast_structure(&px[s], &py[s], &window)?;
        let pooled = if s + 1 == levels {
            comps.ssim_map().mean()
        } else {
            let cs = &comps.contrast_structure;
            match weighting {
                IwWeighting::Uniform => cs.mean(),
                IwWeighting::Information => {
                    let parent = if s + 2 < levels {
                        Some(expand(&px[s + 1], px[s].height(), px[s].width(), &k5)?)
                    } else {
                        None
                    };
                    let iw = info_content(&px[s], &py[s], parent.as_ref())?
                        .crop_center(cs.height(), cs.width());
                    weighted_mean(cs.data(), iw.data())
                }
            }
        };
        value *= pooled.max(0.0).powf(ws);
    }
    FrScore::similarity(value)
}

/// Information-weighted SSIM over a five-level Laplacian pyramid.
pub fn iw_ssim(reference: &Image, distorted: &Image) -> Result<FrScore> {
    iw_ssim_with(reference, distorted, IwWeighting::Information)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn identity() {
        let img = synthetic::natural(128, 128, 3);
        let v = iw_ssim(&img, &img).unwrap().value;
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        let flat = Image::constant(128, 128, 1, 0.3).unwrap();
        assert!((iw_ssim(&flat, &flat).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pyramid_reconstructs() {
        let x = synthetic::natural(40, 36, 1).plane(0).clone();
        let bands = laplacian_pyramid(&x, 4).unwrap();
        let k = binomial5();
        let mut rec = bands[3].clone();
        for b in bands[..3].iter().rev() {
            let up = expand(&rec, b.height(), b.width(), &k).unwrap();
            rec = b.zip_map(&up, |a, c| a + c);
        }
        for (a, b) in rec.data().iter().zip(x.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_weighting_equals_plain_pooling() {
        // Independent route: per-scale means of the contrast-structure maps.
        let a = synthetic::natural(128, 112, 1);
        let b = synthetic::with_gaussian_noise(&a, 0.05, 4);
        let got = iw_ssim_with(&a, &b, IwWeighting::Uniform).unwrap().value;

        let px = laplacian_pyramid(&scale255(&a.luma()), 5).unwrap();
        let py = laplacian_pyramid(&scale255(&b.luma()), 5).unwrap();
        let window = Kernel2D::gaussian(7, 1.5).unwrap();
        let mut expected = 1.0;
        for (s, w) in ScaleWeights::ms_ssim().as_slice().iter().enumerate() {
            let c = contrast_structure(&px[s], &py[s], &window).unwrap();
            let m = if s == 4 {
                c.ssim_map().mean()
            } else {
                c.contrast_structure.mean()
            };
            expected *= m.max(0.0).powf(*w);
        }
        assert!((got - expected).abs() < 1e-6);
    }

    #[test]
    fn directional() {
        let a = synthetic::natural(128, 128, 1);
        let b = synthetic::with_gaussian_noise(&a, 0.1, 2);
        let ab = iw_ssim(&a, &b).unwrap().value;
        let ba = iw_ssim(&b, &a).unwrap().value;
        assert!((ab - ba).abs() > 1e-6);
    }
}
