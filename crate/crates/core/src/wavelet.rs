use crate::error::{IqaError, Result};
use crate::image::Plane;

/// One level of an orthonormal 2-D Haar analysis.
///
/// `lh` holds vertical differences of horizontal sums (responds to horizontal
/// edges), `hl` the converse, `hh` the diagonal detail.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarLevel {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl HaarLevel {
    pub fn energy(&self) -> f64 {
        [&self.ll, &self.lh, &self.hl, &self.hh]
            .iter()
            .map(|p| p.data().iter().map(|v| v * v).sum::<f64>())
            .sum()
    }
}

fn haar_step(plane: &Plane) -> HaarLevel {
    let (h, w) = (plane.height() / 2, plane.width() / 2);
    let mut ll = Vec::with_capacity(h * w);
    let mut lh = Vec::with_capacity(h * w);
    let mut hl = Vec::with_capacity(h * w);
    let mut hh = Vec::with_capacity(h * w);
    for i in 0..h {
        let top = plane.row(2 * i);
        let bottom = plane.row(2 * i + 1);
        for j in 0..w {
            let (a, b) = (top[2 * j], top[2 * j + 1]);
            let (c, d) = (bottom[2 * j], bottom[2 * j + 1]);
            ll.push((a + b + c + d) / 2.0);
            lh.push((a + b - c - d) / 2.0);
            hl.push((a - b + c - d) / 2.0);
            hh.push((a - b - c + d) / 2.0);
        }
    }
    let mk = |d| Plane::new(h, w, d).expect("half size");
    HaarLevel {
        ll: mk(ll),
        lh: mk(lh),
        hl: mk(hl),
        hh: mk(hh),
    }
}

/// Multi-level orthonormal Haar decomposition.
///
/// Level `k + 1` decomposes the `ll` band of level `k`. An odd trailing row or
/// column at any level is dropped, so energy is conserved exactly only for
/// sides divisible by `2^levels`.
pub fn haar_dwt(plane: &Plane, levels: usize) -> Result<Vec<HaarLevel>> {
    if levels == 0 {
        return Err(IqaError::InvalidArgument(
            "levels must be at least 1".into(),
        ));
    }
    let need = 1usize << levels;
    let (h, w) = plane.dims();
    if h < need || w < need {
        return Err(IqaError::TooSmall {
            what: "Haar decomposition",
            min_height: need,
            min_width: need,
            height: h,
            width: w,
        });
    }
    let mut out: Vec<HaarLevel> = Vec::with_capacity(levels);
    for _ in 0..levels {
        let src = out.last().map_or(plane, |l| &l.ll);
        let next = haar_step(src);
        out.push(next);
    }
    Ok(out)
}
