//! Complex planes and 2-D FFTs on top of `rustfft`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::image::Plane;

/// Complex-valued raster (frequency responses, analytic filter outputs).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    height: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(height: usize, width: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), height * width, "complex field size");
        Self {
            height,
            width,
            data,
        }
    }

    pub fn from_real(plane: &Plane) -> Self {
        Self::new(
            plane.height(),
            plane.width(),
            plane
                .data()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        )
    }

    pub fn from_parts(re: &Plane, im: &Plane) -> Self {
        assert_eq!(re.dims(), im.dims(), "real and imaginary planes differ");
        Self::new(
            re.height(),
            re.width(),
            re.data()
                .iter()
                .zip(im.data())
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect(),
        )
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.width + col]
    }

    pub fn real(&self) -> Plane {
        self.part(|z| z.re)
    }

    pub fn imag(&self) -> Plane {
        self.part(|z| z.im)
    }

    pub fn norm(&self) -> Plane {
        self.part(|z| z.norm())
    }

    fn part(&self, f: impl Fn(&Complex64) -> f64) -> Plane {
        Plane::new(self.height, self.width, self.data.iter().map(f).collect()).expect("field dims")
    }

    /// Element-wise product with a real frequency-domain filter.
    pub fn scaled_by(&self, filter: &Plane) -> ComplexField {
        assert_eq!(self.dims(), filter.dims());
        ComplexField::new(
            self.height,
            self.width,
            self.data
                .iter()
                .zip(filter.data())
                .map(|(z, &f)| z * f)
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

fn transform(field: &ComplexField, inverse: bool) -> ComplexField {
    let (h, w) = field.dims();
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    let mut data = field.data.clone();
    for row in data.chunks_exact_mut(w) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); h];
    for c in 0..w {
        for r in 0..h {
            col[r] = data[r * w + c];
        }
        col_fft.process(&mut col);
        for r in 0..h {
            data[r * w + c] = col[r];
        }
    }
    if inverse {
        let norm = 1.0 / (h * w) as f64;
        data.iter_mut().for_each(|z| *z *= norm);
    }
    ComplexField::new(h, w, data)
}

/// Unnormalized forward 2-D DFT.
pub fn fft2(field: &ComplexField) -> ComplexField {
    transform(field, false)
}

/// Inverse 2-D DFT, normalized by `1 / (H W)`.
pub fn ifft2(field: &ComplexField) -> ComplexField {
    transform(field, true)
}

/// Normalized frequency coordinate of FFT bin `k` on an axis of length `n`,
/// using the centered grid `[-n/2, n/2) / n` (even) or
/// `[-(n-1)/2, (n-1)/2] / (n-1)` (odd), then undoing the centering shift.
pub(crate) fn frequency_axis(n: usize) -> Vec<f64> {
    let centered: Vec<f64> = if n % 2 == 1 {
        let half = (n as f64 - 1.0) / 2.0;
        let denom = (n as f64 - 1.0).max(1.0);
        (0..n).map(|i| (i as f64 - half) / denom).collect()
    } else {
        (0..n)
            .map(|i| (i as f64 - (n / 2) as f64) / n as f64)
            .collect()
    };
    (0..n).map(|i| centered[(i + n / 2) % n]).collect()
}
