use std::fmt;
use std::str::FromStr;

use crate::error::{IqaError, Result};
use crate::image::{Image, Plane};

/// How the two forward differences at a pixel are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TvNorm {
    /// `|∇x| + |∇y|`
    #[default]
    Anisotropic,
    /// `sqrt(∇x² + ∇y²)`
    Isotropic,
}

impl FromStr for TvNorm {
    type Err = IqaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anisotropic" | "l1" => Ok(TvNorm::Anisotropic),
            "isotropic" | "l2" => Ok(TvNorm::Isotropic),
            other => Err(IqaError::InvalidArgument(format!(
                "unknown TV norm `{other}`"
            ))),
        }
    }
}

impl fmt::Display for TvNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TvNorm::Anisotropic => "anisotropic",
            TvNorm::Isotropic => "isotropic",
        })
    }
}

/// Mean per-pixel total variation of one plane.
///
/// Forward differences; the difference past the last row or column is 0.
pub fn total_variation_plane(plane: &Plane, norm: TvNorm) -> Result<f64> {
    let (h, w) = plane.dims();
    if h < 2 || w < 2 {
        return Err(IqaError::TooSmall {
            what: "total variation",
            min_height: 2,
            min_width: 2,
            height: h,
            width: w,
        });
    }
    let mut acc = 0.0;
    for r in 0..h {
        for c in 0..w {
            let v = plane.get(r, c);
            let dx = if c + 1 < w {
                plane.get(r, c + 1) - v
            } else {
                0.0
            };
            let dy = if r + 1 < h {
                plane.get(r + 1, c) - v
            } else {
                0.0
            };
            acc += match norm {
                TvNorm::Anisotropic => dx.abs() + dy.abs(),
                TvNorm::Isotropic => dx.hypot(dy),
            };
        }
    }
    Ok(acc / (h * w) as f64)
}

/// Total variation averaged over pixels and channels; 0 for a constant image.
pub fn total_variation(img: &Image, norm: TvNorm) -> Result<f64> {
    let mut acc = 0.0;
    for p in img.planes() {
        acc += total_variation_plane(p, norm)?;
    }
    Ok(acc / img.channels() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_is_zero() {
        let img = Image::constant(5, 7, 3, 0.4).unwrap();
        assert_eq!(total_variation(&img, TvNorm::Anisotropic).unwrap(), 0.0);
        assert_eq!(total_variation(&img, TvNorm::Isotropic).unwrap(), 0.0);
    }

    #[test]
    fn horizontal_ramp_closed_form() {
        let (h, w, step) = (4, 10, 0.05);
        let p = Plane::from_fn(h, w, |_, c| step * c as f64);
        let expected = step * (w - 1) as f64 / w as f64;
        for norm in [TvNorm::Anisotropic, TvNorm::Isotropic] {
            assert!((total_variation_plane(&p, norm).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn checkerboard_is_maximal_among_binary_3x3() {
        for norm in [TvNorm::Anisotropic, TvNorm::Isotropic] {
            let mut best = 0.0f64;
            for bits in 0u32..512 {
                let p = Plane::from_fn(3, 3, |r, c| ((bits >> (r * 3 + c)) & 1) as f64);
                best = best.max(total_variation_plane(&p, norm).unwrap());
            }
            let board = Plane::from_fn(3, 3, |r, c| ((r + c) % 2) as f64);
            assert_eq!(total_variation_plane(&board, norm).unwrap(), best);
        }
    }

    #[test]
    fn rejects_single_row() {
        assert!(total_variation_plane(&Plane::zeros(1, 8), TvNorm::Anisotropic).is_err());
    }

    #[test]
    fn norm_parsing() {
        assert_eq!("isotropic".parse::<TvNorm>().unwrap(), TvNorm::Isotropic);
        assert!("l3".parse::<TvNorm>().is_err());
    }

    fn plane_strategy() -> impl Strategy<Value = Plane> {
        prop::collection::vec(-1.0f64..1.0, 36).prop_map(|v| Plane::new(6, 6, v).unwrap())
    }

    proptest! {
        #[test]
        fn seminorm(x in plane_strategy(), y in plane_strategy(), a in -3.0f64..3.0, c in -2.0f64..2.0) {
            for norm in [TvNorm::Anisotropic, TvNorm::Isotropic] {
                let tv = |p: &Plane| total_variation_plane(p, norm).unwrap();
                prop_assert!((tv(&x.map(|v| a * v)) - a.abs() * tv(&x)).abs() < 1e-9);
                prop_assert!((tv(&x.map(|v| v + c)) - tv(&x)).abs() < 1e-9);
                let sum = x.zip_map(&y, |p, q| p + q);
                prop_assert!(tv(&sum) <= tv(&x) + tv(&y) + 1e-9);
            }
        }
    }
}
