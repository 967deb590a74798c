use super::{
    check_pair, is_achromatic, real_power, scale255, similarity_map, weighted_mean, FrScore,
};
use crate::error::Result;
use crate::filter::{gradient_magnitude, GradientOperator};
use crate::image::{Image, Plane, Yiq};
use crate::phase::{phase_congruency, MIN_PC_SIDE};
use crate::pyramid::viewing_distance_downsample;

const T1: f64 = 0.85;
const T2: f64 = 160.0;
const T3: f64 = 200.0;
const T4: f64 = 200.0;
const LAMBDA: f64 = 0.03;

/// Feature similarity: phase congruency and gradient magnitude similarity
/// pooled with `max(PC₁, PC₂)` weights. `chromatic` multiplies in the YIQ
/// chroma similarity raised to λ.
pub fn fsim(reference: &Image, distorted: &Image, chromatic: bool) -> Result<FrScore> {
    check_pair(reference, distorted, "FSIM", MIN_PC_SIDE)?;
    let x = Channels::of(reference)?;
    let y = Channels::of(distorted)?;
    let pc1 = phase_congruency(&x.y, 4, 4)?.pc;
    let pc2 = phase_congruency(&y.y, 4, 4)?.pc;
    let g1 = gradient_magnitude(&x.y, GradientOperator::Scharr)?;
    let g2 = gradient_magnitude(&y.y, GradientOperator::Scharr)?;
    let chroma = match (chromatic, &x.iq, &y.iq) {
        (true, Some(a), Some(b)) => Some(chroma_term(a, b)),
        _ => None,
    };
    FrScore::similarity(pool(&pc1, &pc2, &g1, &g2, chroma.as_ref()))
}

struct Channels {
    y: Plane,
    iq: Option<(Plane, Plane)>,
}

impl Channels {
    fn of(img: &Image) -> Result<Self> {
        let down = |p: Plane| viewing_distance_downsample(&scale255(&p));
        if is_achromatic(img) {
            return Ok(Self {
                y: down(img.plane(0).clone())?,
                iq: None,
            });
        }
        let Yiq { y, i, q } = crate::image::rgb_to_yiq(img)?;
        Ok(Self {
            y: down(y)?,
            iq: Some((down(i)?, down(q)?)),
        })
    }
}

fn chroma_term(a: &(Plane, Plane), b: &(Plane, Plane)) -> Plane {
    let si = similarity_map(&a.0, &b.0, T3);
    let sq = similarity_map(&a.1, &b.1, T4);
    si.zip_map(&sq, |i, q| real_power(i * q, LAMBDA))
}

/// Pools precomputed PC, gradient and optional chroma maps into the score.
pub(crate) fn pool(
    pc1: &Plane,
    pc2: &Plane,
    g1: &Plane,
    g2: &Plane,
    chroma: Option<&Plane>,
) -> f64 {
    let spc = similarity_map(pc1, pc2, T1);
    let sg = similarity_map(g1, g2, T2);
    let mut sim = spc.zip_map(&sg, |a, b| a * b);
    if let Some(c) = chroma {
        sim = sim.zip_map(c, |a, b| a * b);
    }
    let weights = pc1.zip_map(pc2, f64::max);
    weighted_mean(sim.data(), weights.data())
}
