//! 2-D correlation with explicit border handling, plus the small fixed
//! kernels (Gaussian windows, Prewitt and Scharr pairs) the metrics share.
//!
//! All filtering here is *correlation*: the kernel is not flipped, so tap
//! `(i, j)` multiplies the sample at offset `(i - kh/2, j - kw/2)`.

use crate::error::{IqaError, Result};
use crate::image::Plane;

/// Border handling for [`convolve2d`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Padding {
    /// Mirror without repeating the edge sample (`dcb|abcd|cba`).
    #[default]
    Reflect,
    /// Repeat the edge sample (`aaa|abcd|ddd`).
    Replicate,
    /// Pad with zeros.
    Zero,
    /// No padding; the output shrinks by `kernel - 1` in each dimension.
    Valid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2D {
    height: usize,
    width: usize,
    taps: Vec<f64>,
    normalized: bool,
    // (column factor, row factor) when taps == col ⊗ row
    separable: Option<(Vec<f64>, Vec<f64>)>,
}

impl Kernel2D {
    pub fn new(height: usize, width: usize, taps: Vec<f64>) -> Result<Self> {
        if height % 2 == 0 || width % 2 == 0 {
            return Err(IqaError::InvalidKernel(format!(
                "kernel must have odd dimensions, got {height}x{width}"
            )));
        }
        if taps.len() != height * width {
            return Err(IqaError::InvalidKernel(format!(
                "{height}x{width} kernel needs {} taps, got {}",
                height * width,
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(IqaError::InvalidKernel("non-finite tap".into()));
        }
        Ok(Self {
            height,
            width,
            taps,
            normalized: false,
            separable: None,
        })
    }

    /// Kernel scaled so its taps sum to one.
    pub fn normalized(height: usize, width: usize, taps: Vec<f64>) -> Result<Self> {
        let sum: f64 = taps.iter().sum();
        if sum.abs() < f64::EPSILON {
            return Err(IqaError::InvalidKernel("taps sum to zero".into()));
        }
        let mut k = Self::new(height, width, taps.into_iter().map(|t| t / sum).collect())?;
        k.normalized = true;
        Ok(k)
    }

    /// Outer product `col ⊗ row`; filtering runs as two 1-D passes.
    pub fn separable(col: Vec<f64>, row: Vec<f64>) -> Result<Self> {
        let taps = col
            .iter()
            .flat_map(|&a| row.iter().map(move |&b| a * b))
            .collect();
        let mut k = Self::new(col.len(), row.len(), taps)?;
        k.normalized = (k.sum() - 1.0).abs() < 1e-9;
        k.separable = Some((col, row));
        Ok(k)
    }

    /// Normalized `size × size` Gaussian window.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        let g = gaussian_1d(size, sigma);
        let mut k = Self::separable(g.clone(), g)?;
        k.normalized = true;
        Ok(k)
    }

    /// Normalized `size × size` averaging window.
    pub fn boxcar(size: usize) -> Result<Self> {
        let t = vec![1.0 / size as f64; size];
        Self::separable(t.clone(), t)
    }

    pub fn identity() -> Self {
        Self::new(1, 1, vec![1.0]).expect("1x1 kernel")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn tap(&self, row: usize, col: usize) -> f64 {
        self.taps[row * self.width + col]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sum(&self) -> f64 {
        self.taps.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let taps = (0..self.width)
            .flat_map(|c| (0..self.height).map(move |r| (r, c)))
            .map(|(r, c)| self.tap(r, c))
            .collect();
        Self {
            height: self.width,
            width: self.height,
            taps,
            normalized: self.normalized,
            separable: self.separable.clone().map(|(c, r)| (r, c)),
        }
    }
}

/// Normalized 1-D Gaussian of odd or even length, centered on the window.
pub fn gaussian_1d(size: usize, sigma: f64) -> Vec<f64> {
    let center = (size as f64 - 1.0) / 2.0;
    let g: Vec<f64> = (0..size)
        .map(|i| {
            let x = i as f64 - center;
            (-(x * x) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = g.iter().sum();
    g.into_iter().map(|v| v / sum).collect()
}

#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

fn pad(
    plane: &Plane,
    top: usize,
    bottom: usize,
    left: usize,
    right: usize,
    mode: Padding,
) -> Plane {
    let (h, w) = plane.dims();
    let (ph, pw) = (h + top + bottom, w + left + right);
    let index = |i: isize, n: usize| -> Option<usize> {
        if (0..n as isize).contains(&i) {
            return Some(i as usize);
        }
        match mode {
            Padding::Reflect => Some(reflect_index(i, n)),
            Padding::Replicate => Some(i.clamp(0, n as isize - 1) as usize),
            Padding::Zero => None,
            Padding::Valid => unreachable!("valid mode is never padded"),
        }
    };
    let cols: Vec<Option<usize>> = (0..pw)
        .map(|c| index(c as isize - left as isize, w))
        .collect();
    let mut out = Vec::with_capacity(ph * pw);
    for r in 0..ph {
        match index(r as isize - top as isize, h) {
            Some(sr) => {
                let row = plane.row(sr);
                out.extend(cols.iter().map(|c| c.map_or(0.0, |c| row[c])));
            }
            None => out.extend(std::iter::repeat_n(0.0, pw)),
        }
    }
    Plane::new(ph, pw, out).expect("padded size")
}

/// Pads `plane` by the given margins using `mode` (anything but `Valid`).
pub fn pad_plane(
    plane: &Plane,
    (top, bottom, left, right): (usize, usize, usize, usize),
    mode: Padding,
) -> Result<Plane> {
    if mode == Padding::Valid {
        return Err(IqaError::InvalidArgument("cannot pad in valid mode".into()));
    }
    Ok(pad(plane, top, bottom, left, right, mode))
}

fn correlate_valid(src: &Plane, k: &Kernel2D) -> Plane {
    let (h, w) = src.dims();
    let (oh, ow) = (h - k.height + 1, w - k.width + 1);
    if let Some((col, row)) = &k.separable {
        // horizontal pass: h × ow
        let mut tmp = vec![0.0; h * ow];
        for r in 0..h {
            let line = src.row(r);
            let dst = &mut tmp[r * ow..(r + 1) * ow];
            for (c, d) in dst.iter_mut().enumerate() {
                *d = line[c..c + row.len()]
                    .iter()
                    .zip(row)
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        // vertical pass
        let mut out = vec![0.0; oh * ow];
        for (i, &t) in col.iter().enumerate() {
            for r in 0..oh {
                let s = &tmp[(r + i) * ow..(r + i + 1) * ow];
                let d = &mut out[r * ow..(r + 1) * ow];
                for (d, s) in d.iter_mut().zip(s) {
                    *d += t * s;
                }
            }
        }
        return Plane::new(oh, ow, out).expect("valid size");
    }
    let mut out = vec![0.0; oh * ow];
    for i in 0..k.height {
        for j in 0..k.width {
            let t = k.tap(i, j);
            if t == 0.0 {
                continue;
            }
            for r in 0..oh {
                let s = &src.row(r + i)[j..j + ow];
                let d = &mut out[r * ow..(r + 1) * ow];
                for (d, s) in d.iter_mut().zip(s) {
                    *d += t * s;
                }
            }
        }
    }
    Plane::new(oh, ow, out).expect("valid size")
}

/// Correlates `plane` with `kernel`.
///
/// Padded modes return a plane of the input size; `Valid` returns
/// `(H - kh + 1) × (W - kw + 1)` and fails if the kernel does not fit.
pub fn convolve2d(plane: &Plane, kernel: &Kernel2D, padding: Padding) -> Result<Plane> {
    let (h, w) = plane.dims();
    match padding {
        Padding::Valid => {
            if kernel.height > h || kernel.width > w {
                return Err(IqaError::TooSmall {
                    what: "valid convolution",
                    min_height: kernel.height,
                    min_width: kernel.width,
                    height: h,
                    width: w,
                });
            }
            Ok(correlate_valid(plane, kernel))
        }
        mode => {
            let (ph, pw) = (kernel.height / 2, kernel.width / 2);
            let padded = pad(plane, ph, ph, pw, pw, mode);
            Ok(correlate_valid(&padded, kernel))
        }
    }
}

/// Derivative operator pairs for [`gradient_magnitude`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientOperator {
    Prewitt,
    Scharr,
}

impl GradientOperator {
    /// Horizontal-derivative kernel; the vertical one is its transpose.
    pub fn horizontal(self) -> Kernel2D {
        let (edge, mid, norm) = match self {
            GradientOperator::Prewitt => (1.0, 1.0, 3.0),
            GradientOperator::Scharr => (3.0, 10.0, 16.0),
        };
        Kernel2D::separable(
            vec![edge / norm, mid / norm, edge / norm],
            vec![1.0, 0.0, -1.0],
        )
        .expect("3x3 kernel")
    }
}

/// `(Gx, Gy)` responses of the operator pair with reflect padding.
pub fn gradient_components(plane: &Plane, op: GradientOperator) -> Result<(Plane, Plane)> {
    let (h, w) = plane.dims();
    if h < 3 || w < 3 {
        return Err(IqaError::TooSmall {
            what: "gradient",
            min_height: 3,
            min_width: 3,
            height: h,
            width: w,
        });
    }
    let kx = op.horizontal();
    let gx = convolve2d(plane, &kx, Padding::Reflect)?;
    let gy = convolve2d(plane, &kx.transpose(), Padding::Reflect)?;
    Ok((gx, gy))
}

/// `sqrt(Gx² + Gy²)` with reflect padding.
pub fn gradient_magnitude(plane: &Plane, op: GradientOperator) -> Result<Plane> {
    let (gx, gy) = gradient_components(plane, op)?;
    Ok(gx.zip_map(&gy, |a, b| (a * a + b * b).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(plane: &Plane, k: &Kernel2D, padding: Padding) -> Plane {
        let (h, w) = plane.dims();
        let (kh, kw) = (k.height() as isize, k.width() as isize);
        let sample = |r: isize, c: isize| -> f64 {
            let fetch = |i: isize, n: usize| -> Option<usize> {
                if i >= 0 && i < n as isize {
                    return Some(i as usize);
                }
                match padding {
                    Padding::Zero => None,
                    Padding::Replicate => Some(i.clamp(0, n as isize - 1) as usize),
                    Padding::Reflect => {
                        // explicit mirror walk
                        let mut i = i;
                        let n = n as isize;
                        while i < 0 || i >= n {
                            if i < 0 {
                                i = -i;
                            }
                            if i >= n {
                                i = 2 * (n - 1) - i;
                            }
                        }
                        Some(i as usize)
                    }
                    Padding::Valid => unreachable!(),
                }
            };
            match (fetch(r, h), fetch(c, w)) {
                (Some(r), Some(c)) => plane.get(r, c),
                _ => 0.0,
            }
        };
        if padding == Padding::Valid {
            let (oh, ow) = (h - k.height() + 1, w - k.width() + 1);
            return Plane::from_fn(oh, ow, |r, c| {
                let mut acc = 0.0;
                for i in 0..k.height() {
                    for j in 0..k.width() {
                        acc += k.tap(i, j) * plane.get(r + i, c + j);
                    }
                }
                acc
            });
        }
        Plane::from_fn(h, w, |r, c| {
            let mut acc = 0.0;
            for i in 0..kh {
                for j in 0..kw {
                    acc += k.tap(i as usize, j as usize)
                        * sample(r as isize + i - kh / 2, c as isize + j - kw / 2);
                }
            }
            acc
        })
    }

    fn lcg_plane(h: usize, w: usize, seed: u64) -> Plane {
        let mut s = seed;
        Plane::from_fn(h, w, |_, _| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        })
    }

    fn max_abs_diff(a: &Plane, b: &Plane) -> f64 {
        assert_eq!(a.dims(), b.dims());
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_kernel() {
        let p = lcg_plane(4, 5, 1);
        for mode in [
            Padding::Reflect,
            Padding::Replicate,
            Padding::Zero,
            Padding::Valid,
        ] {
            assert_eq!(convolve2d(&p, &Kernel2D::identity(), mode).unwrap(), p);
        }
    }

    #[test]
    fn box_preserves_constant() {
        let p = Plane::filled(6, 7, 0.37);
        let out = convolve2d(&p, &Kernel2D::boxcar(3).unwrap(), Padding::Reflect).unwrap();
        assert!(out.data().iter().all(|v| (v - 0.37).abs() < 1e-12));
    }

    #[test]
    fn small_random_case_matches_naive() {
        let p = lcg_plane(5, 5, 7);
        let k = Kernel2D::new(3, 3, lcg_plane(3, 3, 8).into_data()).unwrap();
        for mode in [
            Padding::Reflect,
            Padding::Replicate,
            Padding::Zero,
            Padding::Valid,
        ] {
            let got = convolve2d(&p, &k, mode).unwrap();
            assert!(max_abs_diff(&got, &naive(&p, &k, mode)) < 1e-6, "{mode:?}");
        }
    }

    #[test]
    fn valid_mode_shape_and_error() {
        let p = lcg_plane(6, 9, 2);
        let k = Kernel2D::gaussian(5, 1.0).unwrap();
        assert_eq!(convolve2d(&p, &k, Padding::Valid).unwrap().dims(), (2, 5));
        let tiny = lcg_plane(3, 9, 2);
        assert!(matches!(
            convolve2d(&tiny, &k, Padding::Valid),
            Err(IqaError::TooSmall { .. })
        ));
    }

    #[test]
    fn kernel_invariants() {
        assert!(Kernel2D::new(2, 3, vec![0.0; 6]).is_err());
        let g = Kernel2D::gaussian(11, 1.5).unwrap();
        assert!(g.is_normalized());
        assert!((g.sum() - 1.0).abs() < 1e-9);
        let n = Kernel2D::normalized(3, 3, (1..=9).map(f64::from).collect()).unwrap();
        assert!((n.sum() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reflect_larger_than_plane() {
        // kernel radius exceeds the plane: mirror must fold repeatedly
        let p = lcg_plane(2, 3, 11);
        let k = Kernel2D::new(7, 7, lcg_plane(7, 7, 12).into_data()).unwrap();
        let got = convolve2d(&p, &k, Padding::Reflect).unwrap();
        assert!(max_abs_diff(&got, &naive(&p, &k, Padding::Reflect)) < 1e-9);
    }

    #[test]
    fn gradient_of_constant_and_ramp() {
        let flat = Plane::filled(8, 8, 0.4);
        for op in [GradientOperator::Prewitt, GradientOperator::Scharr] {
            let g = gradient_magnitude(&flat, op).unwrap();
            assert!(g.data().iter().all(|v| v.abs() < 1e-12));
            // x(i, j) = j: interior magnitude equals the operator gain, 2
            let ramp = Plane::from_fn(8, 8, |_, c| c as f64);
            let g = gradient_magnitude(&ramp, op).unwrap();
            for r in 0..8 {
                for c in 1..7 {
                    assert!((g.get(r, c) - 2.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn gradient_rotation() {
        let p = lcg_plane(9, 9, 3);
        // rotate 90° clockwise: rot(r, c) = p(n-1-c, r)
        let rot =
            |q: &Plane| Plane::from_fn(q.width(), q.height(), |r, c| q.get(q.height() - 1 - c, r));
        for op in [GradientOperator::Prewitt, GradientOperator::Scharr] {
            let a = rot(&gradient_magnitude(&p, op).unwrap());
            let b = gradient_magnitude(&rot(&p), op).unwrap();
            assert!(max_abs_diff(&a, &b) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn all_modes_match_naive_16x16(seed in 0u64..1000, kh in 0usize..3, kw in 0usize..3) {
            let p = lcg_plane(16, 16, seed);
            let k = Kernel2D::new(2 * kh + 1, 2 * kw + 5, lcg_plane(2 * kh + 1, 2 * kw + 5, seed + 1).into_data()).unwrap();
            for mode in [Padding::Reflect, Padding::Replicate, Padding::Zero, Padding::Valid] {
                let got = convolve2d(&p, &k, mode).unwrap();
                prop_assert!(max_abs_diff(&got, &naive(&p, &k, mode)) < 1e-6);
            }
            let g = Kernel2D::gaussian(2 * kh + 3, 1.1).unwrap();
            for mode in [Padding::Reflect, Padding::Replicate, Padding::Zero, Padding::Valid] {
                let got = convolve2d(&p, &g, mode).unwrap();
                prop_assert!(max_abs_diff(&got, &naive(&p, &g, mode)) < 1e-6);
            }
        }
    }
}
