use nalgebra::Matrix3;

use super::{Image, Plane};
use crate::error::{IqaError, Result};

/// BT.601 luma weights; first row of the YIQ matrix.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

const YIQ: [[f64; 3]; 3] = [
    LUMA_WEIGHTS,
    [0.5959, -0.2746, -0.3213],
    [0.2115, -0.5227, 0.3112],
];

const LMN: [[f64; 3]; 3] = [[0.06, 0.63, 0.27], [0.30, 0.04, -0.35], [0.34, -0.60, 0.17]];

/// Luminance/chrominance planes in NTSC YIQ.
#[derive(Clone, Debug, PartialEq)]
pub struct Yiq {
    pub y: Plane,
    pub i: Plane,
    pub q: Plane,
}

/// Opponent-color planes used by the saliency-based metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct Lmn {
    pub l: Plane,
    pub m: Plane,
    pub n: Plane,
}

fn require_rgb(img: &Image) -> Result<()> {
    if img.channels() != 3 {
        return Err(IqaError::InvalidArity {
            expected: 3,
            actual: img.channels(),
        });
    }
    Ok(())
}

fn apply_row(row: &[f64; 3], r: &Plane, g: &Plane, b: &Plane) -> Plane {
    let data = r
        .data()
        .iter()
        .zip(g.data())
        .zip(b.data())
        .map(|((&r, &g), &b)| row[0] * r + row[1] * g + row[2] * b)
        .collect();
    Plane::new(r.height(), r.width(), data).expect("same dims as input")
}

pub(crate) fn luma_of(r: &Plane, g: &Plane, b: &Plane) -> Plane {
    apply_row(&LUMA_WEIGHTS, r, g, b)
}

pub(crate) fn yiq_of(r: &Plane, g: &Plane, b: &Plane) -> Yiq {
    Yiq {
        y: apply_row(&YIQ[0], r, g, b),
        i: apply_row(&YIQ[1], r, g, b),
        q: apply_row(&YIQ[2], r, g, b),
    }
}

pub(crate) fn lmn_of(r: &Plane, g: &Plane, b: &Plane) -> Lmn {
    Lmn {
        l: apply_row(&LMN[0], r, g, b),
        m: apply_row(&LMN[1], r, g, b),
        n: apply_row(&LMN[2], r, g, b),
    }
}

/// Y = 0.299 R + 0.587 G + 0.114 B.
pub fn rgb_to_luma(img: &Image) -> Result<Image> {
    require_rgb(img)?;
    Image::from_plane(img.luma())
}

pub fn rgb_to_yiq(img: &Image) -> Result<Yiq> {
    require_rgb(img)?;
    let [r, g, b] = img.planes() else {
        unreachable!()
    };
    Ok(yiq_of(r, g, b))
}

pub fn rgb_to_lmn(img: &Image) -> Result<Lmn> {
    require_rgb(img)?;
    let [r, g, b] = img.planes() else {
        unreachable!()
    };
    Ok(lmn_of(r, g, b))
}

/// Inverse YIQ transform. The result is not clamped, so it is returned as planes.
pub fn yiq_to_rgb(yiq: &Yiq) -> [Plane; 3] {
    let m = Matrix3::from_fn(|r, c| YIQ[r][c]);
    let inv = m.try_inverse().expect("YIQ matrix is invertible");
    let row = |k: usize| [inv[(k, 0)], inv[(k, 1)], inv[(k, 2)]];
    [
        apply_row(&row(0), &yiq.y, &yiq.i, &yiq.q),
        apply_row(&row(1), &yiq.y, &yiq.i, &yiq.q),
        apply_row(&row(2), &yiq.y, &yiq.i, &yiq.q),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pixel(r: f64, g: f64, b: f64) -> Image {
        Image::new(1, 1, 3, vec![r, g, b]).unwrap()
    }

    fn matmul(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(m) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        out
    }

    #[test]
    fn gray_is_fixed_point_of_luma() {
        for c in [0.0, 0.25, 0.5, 1.0] {
            let y = rgb_to_luma(&pixel(c, c, c)).unwrap();
            assert!((y.plane(0).get(0, 0) - c).abs() < 1e-12);
        }
    }

    #[test]
    fn red_primary() {
        let red = pixel(1.0, 0.0, 0.0);
        assert!((rgb_to_luma(&red).unwrap().plane(0).get(0, 0) - 0.299).abs() < 1e-12);
        let yiq = rgb_to_yiq(&red).unwrap();
        assert!((yiq.y.get(0, 0) - 0.299).abs() < 1e-3);
        assert!((yiq.i.get(0, 0) - 0.596).abs() < 1e-3);
        assert!((yiq.q.get(0, 0) - 0.211).abs() < 1e-3);
    }

    #[test]
    fn achromatic_has_no_chroma() {
        let yiq = rgb_to_yiq(&pixel(0.7, 0.7, 0.7)).unwrap();
        assert!((yiq.y.get(0, 0) - 0.7).abs() < 1e-12);
        assert!(yiq.i.get(0, 0).abs() < 1e-12);
        assert!(yiq.q.get(0, 0).abs() < 1e-12);
    }

    #[test]
    fn lmn_of_white_is_row_sums() {
        let lmn = rgb_to_lmn(&pixel(1.0, 1.0, 1.0)).unwrap();
        assert!((lmn.l.get(0, 0) - 0.96).abs() < 1e-12);
        assert!((lmn.m.get(0, 0) + 0.01).abs() < 1e-12);
        assert!((lmn.n.get(0, 0) + 0.09).abs() < 1e-12);
        let zero = rgb_to_lmn(&pixel(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(zero.l.get(0, 0), 0.0);
        assert_eq!(zero.n.get(0, 0), 0.0);
    }

    #[test]
    fn transforms_match_scalar_matmul() {
        let img = Image::new(
            2,
            2,
            3,
            (0..12).map(|k| ((k * 7) % 11) as f64 / 10.0).collect(),
        )
        .unwrap();
        let yiq = rgb_to_yiq(&img).unwrap();
        let lmn = rgb_to_lmn(&img).unwrap();
        let luma = rgb_to_luma(&img).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let v = [
                    img.plane(0).get(r, c),
                    img.plane(1).get(r, c),
                    img.plane(2).get(r, c),
                ];
                let y = matmul(&YIQ, v);
                let l = matmul(&LMN, v);
                assert!((yiq.y.get(r, c) - y[0]).abs() < 1e-12);
                assert!((yiq.i.get(r, c) - y[1]).abs() < 1e-12);
                assert!((yiq.q.get(r, c) - y[2]).abs() < 1e-12);
                assert!((lmn.l.get(r, c) - l[0]).abs() < 1e-12);
                assert!((lmn.m.get(r, c) - l[1]).abs() < 1e-12);
                assert!((lmn.n.get(r, c) - l[2]).abs() < 1e-12);
                assert_eq!(luma.plane(0).get(r, c), yiq.y.get(r, c));
            }
        }
    }

    #[test]
    fn yiq_round_trip() {
        let img = Image::new(3, 1, 3, vec![0.1, 0.9, 0.4, 0.3, 0.0, 1.0, 0.5, 0.6, 0.2]).unwrap();
        let rgb = yiq_to_rgb(&rgb_to_yiq(&img).unwrap());
        for (c, plane) in rgb.iter().enumerate() {
            for (a, b) in plane.data().iter().zip(img.plane(c).data()) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn gray_input_is_rejected() {
        let gray = Image::constant(2, 2, 1, 0.5).unwrap();
        assert!(matches!(
            rgb_to_yiq(&gray),
            Err(IqaError::InvalidArity {
                expected: 3,
                actual: 1
            })
        ));
        assert!(rgb_to_luma(&gray).is_err());
        assert!(rgb_to_lmn(&gray).is_err());
    }
}
