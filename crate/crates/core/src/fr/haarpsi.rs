use super::{check_pair, is_achromatic, scale255, similarity_map, weighted_mean, FrScore};
use crate::error::{IqaError, Result};
use crate::image::{yiq_of, Image, Plane};
use crate::pyramid::avg_pool2;

const C: f64 = 30.0;
const ALPHA: f64 = 4.2;
const SCALES: usize = 3;

pub const HAARPSI_MIN_SIDE: usize = 8;

/// Zero-padded box sums via a summed-area table.
struct BoxSums {
    height: usize,
    width: usize,
    table: Vec<f64>,
}

impl BoxSums {
    fn new(p: &Plane) -> Self {
        let (h, w) = p.dims();
        let mut table = vec![0.0; (h + 1) * (w + 1)];
        for r in 0..h {
            let mut run = 0.0;
            for c in 0..w {
                run += p.get(r, c);
                table[(r + 1) * (w + 1) + c + 1] = table[r * (w + 1) + c + 1] + run;
            }
        }
        Self {
            height: h,
            width: w,
            table,
        }
    }

    /// Sum over rows `r0..=r1`, cols `c0..=c1`; out-of-range samples are 0.
    fn sum(&self, r0: isize, r1: isize, c0: isize, c1: isize) -> f64 {
        let clamp = |v: isize, n: usize| v.clamp(0, n as isize) as usize;
        let (r0, r1) = (clamp(r0, self.height), clamp(r1 + 1, self.height));
        let (c0, c1) = (clamp(c0, self.width), clamp(c1 + 1, self.width));
        if r0 >= r1 || c0 >= c1 {
            return 0.0;
        }
        let w = self.width + 1;
        self.table[r1 * w + c1] - self.table[r0 * w + c1] - self.table[r1 * w + c0]
            + self.table[r0 * w + c0]
    }
}

/// Haar high-pass responses for scales `1..=scales`, returned as
/// `(row-difference, column-difference)` pairs.
///
/// Scale `k` uses a `2^k × 2^k` filter whose entries are `±2^-k`, anchored so
/// that the window spans `2^(k-1) - 1` samples before the pixel and `2^(k-1)`
/// after it, with zero padding outside the plane.
pub fn haar_responses(plane: &Plane, scales: usize) -> Result<Vec<(Plane, Plane)>> {
    if scales == 0 || scales > 16 {
        return Err(IqaError::InvalidArgument(format!(
            "Haar scale count must be in 1..=16, got {scales}"
        )));
    }
    let sums = BoxSums::new(plane);
    let (h, w) = plane.dims();
    Ok((1..=scales)
        .map(|k| {
            let n = 1isize << k;
            let half = n / 2;
            let norm = 1.0 / n as f64;
            let rows = Plane::from_fn(h, w, |r, c| {
                let (r, c) = (r as isize, c as isize);
                let (c0, c1) = (c - half + 1, c + half);
                (sums.sum(r - half + 1, r, c0, c1) - sums.sum(r + 1, r + half, c0, c1)) * norm
            });
            let cols = Plane::from_fn(h, w, |r, c| {
                let (r, c) = (r as isize, c as isize);
                let (r0, r1) = (r - half + 1, r + half);
                (sums.sum(r0, r1, c - half + 1, c) - sums.sum(r0, r1, c + 1, c + half)) * norm
            });
            (rows, cols)
        })
        .collect())
}

fn logit(v: f64) -> f64 {
    1.0 / (1.0 + (-ALPHA * v).exp())
}

fn logit_inv(v: f64) -> f64 {
    (v / (1.0 - v)).ln() / ALPHA
}

/// Haar wavelet-based perceptual similarity index.
pub fn haarpsi(reference: &Image, distorted: &Image) -> Result<FrScore> {
    check_pair(reference, distorted, "HaarPSI", HAARPSI_MIN_SIDE)?;
    let colour = !(is_achromatic(reference) && is_achromatic(distorted));
    let prepare = |img: &Image| -> Result<Vec<Plane>> {
        let planes = if colour {
            let [r, g, b] = img.to_rgb_planes();
            let yiq = yiq_of(&r, &g, &b);
            vec![yiq.y, yiq.i, yiq.q]
        } else {
            vec![img.plane(0).clone()]
        };
        planes.iter().map(|p| avg_pool2(&scale255(p))).collect()
    };
    let x = prepare(reference)?;
    let y = prepare(distorted)?;
    let cx = haar_responses(&x[0], SCALES)?;
    let cy = haar_responses(&y[0], SCALES)?;

    let mut sims: Vec<Plane> = Vec::with_capacity(3);
    let mut weights: Vec<Plane> = Vec::with_capacity(3);
    for ori in 0..2 {
        let pick = |c: &[(Plane, Plane)], s: usize| -> Plane {
            let p = if ori == 0 { &c[s].0 } else { &c[s].1 };
            p.map(f64::abs)
        };
        weights.push(pick(&cx, 2).zip_map(&pick(&cy, 2), f64::max));
        let s0 = similarity_map(&pick(&cx, 0), &pick(&cy, 0), C);
        let s1 = similarity_map(&pick(&cx, 1), &pick(&cy, 1), C);
        sims.push(s0.zip_map(&s1, |a, b| 0.5 * (a + b)));
    }
    if colour {
        let mean2 = |p: &Plane| {
            let sums = BoxSums::new(p);
            Plane::from_fn(p.height(), p.width(), |r, c| {
                let (r, c) = (r as isize, c as isize);
                (sums.sum(r, r + 1, c, c + 1) / 4.0).abs()
            })
        };
        let si = similarity_map(&mean2(&x[1]), &mean2(&y[1]), C);
        let sq = similarity_map(&mean2(&x[2]), &mean2(&y[2]), C);
        sims.push(si.zip_map(&sq, |a, b| 0.5 * (a + b)));
        weights.push(weights[0].zip_map(&weights[1], |a, b| 0.5 * (a + b)));
    }
    let values: Vec<f64> = sims
        .iter()
        .flat_map(|p| p.data().iter().map(|&v| logit(v)))
        .collect();
    let w: Vec<f64> = weights
        .iter()
        .flat_map(|p| p.data().iter().copied())
        .collect();
    FrScore::similarity(logit_inv(weighted_mean(&values, &w)).powi(2))
}
