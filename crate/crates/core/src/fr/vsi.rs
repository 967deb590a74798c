use super::{
    check_pair, is_achromatic, real_power, scale255, similarity_map, weighted_mean, FrScore,
};
use crate::error::Result;
use crate::fft::{fft2, frequency_axis, ifft2, ComplexField};
use crate::filter::{gradient_magnitude, GradientOperator};
use crate::image::{Image, Lmn, Plane};
use crate::pyramid::{resize_bilinear, viewing_distance_downsample};

const C_VS: f64 = 1.27;
const C_GM: f64 = 386.0;
const C_CHROMA: f64 = 130.0;
const ALPHA: f64 = 0.40;
const LAMBDA: f64 = 0.020;

const SIGMA_F: f64 = 1.34;
const OMEGA_0: f64 = 0.021;
const SIGMA_D: f64 = 145.0;
const SIGMA_C: f64 = 0.001;
const SDSP_SIDE: usize = 256;

pub const VSI_MIN_SIDE: usize = 8;

/// SDSP saliency in `[0, 1]` for an RGB triple of planes on the unit scale.
///
/// Works on a 256×256 bilinear copy in CIELAB: a log-Gabor band-pass of the
/// three Lab channels, times a Gaussian centre prior, times a warm-colour
/// prior. The colour prior is taken as 1 when the input has no chroma.
pub fn sdsp_saliency(rgb: &[Plane; 3]) -> Result<Plane> {
    let (h, w) = rgb[0].dims();
    let achromatic = rgb[0] == rgb[1] && rgb[1] == rgb[2];
    let small = [0, 1, 2].map(|c| resize_bilinear(&rgb[c], SDSP_SIDE, SDSP_SIDE));
    let [l, a, b] = rgb_to_lab(&small);
    let filter = log_gabor(SDSP_SIDE, SDSP_SIDE);
    let band = |p: &Plane| ifft2(&fft2(&ComplexField::from_real(p)).scaled_by(&filter)).real();
    let (fl, fa, fb) = (band(&l), band(&a), band(&b));
    let n = SDSP_SIDE as f64;
    let (cy, cx) = (n / 2.0, n / 2.0);
    let colour_prior = if achromatic {
        Plane::filled(SDSP_SIDE, SDSP_SIDE, 1.0)
    } else {
        let norm = |p: &Plane| {
            let (lo, hi) = (p.min(), p.max());
            p.map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
        };
        let (na, nb) = (norm(&a), norm(&b));
        na.zip_map(&nb, |x, y| {
            1.0 - (-(x * x + y * y) / (SIGMA_C * SIGMA_C)).exp()
        })
    };
    let sal = Plane::from_fn(SDSP_SIDE, SDSP_SIDE, |r, c| {
        let k = r * SDSP_SIDE + c;
        let sf = (fl.data()[k].powi(2) + fa.data()[k].powi(2) + fb.data()[k].powi(2)).sqrt();
        // 1-based pixel coordinates, as in the reference implementation
        let (dy, dx) = (r as f64 + 1.0 - cy, c as f64 + 1.0 - cx);
        let sd = (-(dy * dy + dx * dx) / (SIGMA_D * SIGMA_D)).exp();
        sf * sd * colour_prior.data()[k]
    });
    let back = resize_bilinear(&sal, h, w);
    let (lo, hi) = (back.min(), back.max());
    Ok(if hi > lo {
        back.map(|v| (v - lo) / (hi - lo))
    } else {
        Plane::zeros(h, w)
    })
}

/// Radial log-Gabor transfer function, zero at DC and beyond radius 0.5.
fn log_gabor(height: usize, width: usize) -> Plane {
    let fy = frequency_axis(height);
    let fx = frequency_axis(width);
    Plane::from_fn(height, width, |r, c| {
        let radius = (fy[r] * fy[r] + fx[c] * fx[c]).sqrt();
        if radius == 0.0 || radius > 0.5 {
            0.0
        } else {
            (-(radius / OMEGA_0).ln().powi(2) / (2.0 * SIGMA_F * SIGMA_F)).exp()
        }
    })
}

/// sRGB (unit scale) to CIELAB with a D50 white point.
fn rgb_to_lab(rgb: &[Plane; 3]) -> [Plane; 3] {
    let lin = |v: f64| {
        if v <= 0.04045 {
            v / 12.92
        } else {
            ((v + 0.055) / 1.055).powf(2.4)
        }
    };
    let f = |t: f64| {
        if t > 0.008856 {
            t.cbrt()
        } else {
            (903.3 * t + 16.0) / 116.0
        }
    };
    let (h, w) = rgb[0].dims();
    let mut out = [Plane::zeros(h, w), Plane::zeros(h, w), Plane::zeros(h, w)];
    for k in 0..h * w {
        let (r, g, b) = (
            lin(rgb[0].data()[k]),
            lin(rgb[1].data()[k]),
            lin(rgb[2].data()[k]),
        );
        let x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.9642;
        let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
        let z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 0.8251;
        let (fx, fy, fz) = (f(x), f(y), f(z));
        out[0].data_mut()[k] = 116.0 * fy - 16.0;
        out[1].data_mut()[k] = 500.0 * (fx - fy);
        out[2].data_mut()[k] = 200.0 * (fy - fz);
    }
    out
}

/// Visual saliency-induced index: saliency, gradient and LMN chroma
/// similarity pooled with `max(VS₁, VS₂)`. The chroma term is dropped for an
/// achromatic pair.
pub fn vsi(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "VSI", VSI_MIN_SIDE)?;
    let chroma = !(is_achromatic(reference) && is_achromatic(distorted));
    let x = prepare(reference)?;
    let y = prepare(distorted)?;
    let chroma_map = chroma.then(|| {
        let sm = similarity_map(&x.m, &y.m, C_CHROMA);
        let sn = similarity_map(&x.n, &y.n, C_CHROMA);
        sm.zip_map(&sn, |a, b| real_power(a * b, LAMBDA))
    });
    let g1 = gradient_magnitude(&x.l, GradientOperator::Scharr)?;
    let g2 = gradient_magnitude(&y.l, GradientOperator::Scharr)?;
    FrScore::similarity(pool(&x.vs, &y.vs, &g1, &g2, chroma_map.as_ref()))
}

struct Prepared {
    vs: Plane,
    l: Plane,
    m: Plane,
    n: Plane,
}

fn prepare(img: &Image) -> Result<Prepared> {
    let rgb = img.to_rgb_planes();
    let vs = viewing_distance_downsample(&sdsp_saliency(&rgb)?)?;
    let lmn: Lmn = crate::image::lmn_of(&rgb[0], &rgb[1], &rgb[2]);
    let down = |p: &Plane| viewing_distance_downsample(&scale255(p));
    Ok(Prepared {
        vs,
        l: down(&lmn.l)?,
        m: down(&lmn.m)?,
        n: down(&lmn.n)?,
    })
}

pub(crate) fn pool(
    vs1: &Plane,
    vs2: &Plane,
    g1: &Plane,
    g2: &Plane,
    chroma: Option<&Plane>,
) -> f64 {
    let svs = similarity_map(vs1, vs2, C_VS);
    let sg = similarity_map(g1, g2, C_GM);
    let mut sim = svs.zip_map(&sg, |s, g| s * g.powf(ALPHA));
    if let Some(c) = chroma {
        sim = sim.zip_map(c, |a, b| a * b);
    }
    let weights = vs1.zip_map(vs2, f64::max);
    weighted_mean(sim.data(), weights.data())
}
