use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::FeatureMatrix;
use crate::error::{IqaError, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
const CLAMP_REL: f64 = 1e-10;
/// Negative eigenvalues beyond this fraction of the largest are an error.
const NEGATIVE_REL: f64 = 1e-6;

/// Sample mean and unbiased covariance of a feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSummary {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GaussianSummary {
    pub fn dimension(&self) -> usize {
        self.mean.len()
    }
}

pub fn gaussian_summary(features: &FeatureMatrix) -> Result<GaussianSummary> {
    let (n, d) = (features.rows(), features.cols());
    if n < 2 {
        return Err(IqaError::InvalidArgument(format!(
            "covariance needs at least 2 samples, got {n}"
        )));
    }
    let x = DMatrix::from_row_slice(n, d, features.data());
    let mean = x.row_mean().transpose();
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mut covariance = centered.transpose() * &centered / (n - 1) as f64;
    covariance = (&covariance + covariance.transpose()) * 0.5;
    Ok(GaussianSummary { mean, covariance })
}

/// Eigenvalues of a symmetric PSD matrix with round-off negatives clamped.
///
/// Eigenvalues below `clamp_rel` times the largest are set to zero.
fn psd_eigen(
    m: &DMatrix<f64>,
    clamp_rel: f64,
    what: &str,
) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let mut eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    for v in eig.eigenvalues.iter_mut() {
        if !v.is_finite() {
            return Err(IqaError::NonFinite("covariance eigenvalues"));
        }
        if *v < -NEGATIVE_REL * top {
            return Err(IqaError::Conditioning(format!(
                "{what} has eigenvalue {v:e}, largest {top:e}"
            )));
        }
        if *v < clamp_rel * top {
            *v = 0.0;
        }
    }
    Ok(eig)
}

/// Fréchet distance between two Gaussians:
/// `‖μa − μb‖² + tr(Σa + Σb − 2 (Σa Σb)^½)`.
///
/// The trace of the square root is taken as `Σ √λ` over the eigenvalues of
/// the symmetric matrix `Σa^½ Σb Σa^½`.
pub fn fid(a: &GaussianSummary, b: &GaussianSummary) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(IqaError::InvalidArgument(format!(
            "feature dimensions differ: {} vs {}",
            a.dimension(),
            b.dimension()
        )));
    }
    let ea = psd_eigen(&a.covariance, CLAMP_REL, "first covariance")?;
    let root_a = &ea.eigenvectors
        * DMatrix::from_diagonal(&ea.eigenvalues.map(f64::sqrt))
        * ea.eigenvectors.transpose();
    let m = &root_a * &b.covariance * &root_a;
    let m = (&m + m.transpose()) * 0.5;
    // the product is quadratic in the covariance scale
    let em = psd_eigen(&m, CLAMP_REL * CLAMP_REL, "covariance product")?;
    let trace_root: f64 = em.eigenvalues.iter().map(|v| v.sqrt()).sum();
    let diff = (&a.mean - &b.mean).norm_squared();
    let value = diff + a.covariance.trace() + b.covariance.trace() - 2.0 * trace_root;
    if !value.is_finite() {
        return Err(IqaError::NonFinite("FID"));
    }
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, d: usize, seed: u64, scale: &[f64]) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n * d)
            .map(|k| rng.random_range(-1.0..1.0) * scale[k % d])
            .collect();
        FeatureMatrix::new(n, d, data).unwrap()
    }

    fn summary(mean: &[f64], cov: &[f64]) -> GaussianSummary {
        let d = mean.len();
        GaussianSummary {
            mean: DVector::from_row_slice(mean),
            covariance: DMatrix::from_row_slice(d, d, cov),
        }
    }

    #[test]
    fn hand_computed_summary() {
        let f = FeatureMatrix::new(2, 2, vec![0.0, 0.0, 2.0, 2.0]).unwrap();
        let s = gaussian_summary(&f).unwrap();
        assert_eq!(s.mean.as_slice(), &[1.0, 1.0]);
        assert_eq!(s.covariance.as_slice(), &[2.0, 2.0, 2.0, 2.0]);
        let same = FeatureMatrix::new(3, 2, vec![0.5, 1.0, 0.5, 1.0, 0.5, 1.0]).unwrap();
        assert!(gaussian_summary(&same)
            .unwrap()
            .covariance
            .iter()
            .all(|v| *v == 0.0));
        assert!(gaussian_summary(&FeatureMatrix::new(1, 2, vec![0.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn two_pass_oracle() {
        let f = random(50, 3, 1, &[1.0, 2.0, 0.5]);
        let s = gaussian_summary(&f).unwrap();
        for i in 0..3 {
            let m: f64 = (0..50).map(|r| f.row(r)[i]).sum::<f64>() / 50.0;
            assert!((s.mean[i] - m).abs() < 1e-12);
            for j in 0..3 {
                let mj: f64 = (0..50).map(|r| f.row(r)[j]).sum::<f64>() / 50.0;
                let c: f64 = (0..50)
                    .map(|r| (f.row(r)[i] - m) * (f.row(r)[j] - mj))
                    .sum::<f64>()
                    / 49.0;
                assert!((s.covariance[(i, j)] - c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn scalar_closed_form() {
        let v = fid(&summary(&[0.0], &[1.0]), &summary(&[1.0], &[4.0])).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_closed_form() {
        let a = summary(
            &[0.0, 1.0, 2.0],
            &[1.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.25],
        );
        let b = summary(
            &[1.0, 1.0, 0.0],
            &[9.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        );
        let expected = 1.0
            + 0.0
            + 4.0
            + (1.0f64 - 3.0).powi(2)
            + (2.0f64 - 1.0).powi(2)
            + (0.5f64 - 1.0).powi(2);
        assert!((fid(&a, &b).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn identity_symmetry_rotation() {
        let fa = random(40, 4, 2, &[1.0, 0.5, 2.0, 1.0]);
        let fb = random(60, 4, 3, &[0.8, 0.8, 1.0, 3.0]);
        let (a, b) = (
            gaussian_summary(&fa).unwrap(),
            gaussian_summary(&fb).unwrap(),
        );
        assert!(fid(&a, &a).unwrap() < 1e-8);
        let ab = fid(&a, &b).unwrap();
        assert!((ab - fid(&b, &a).unwrap()).abs() < 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0))
            .qr()
            .q();
        let rotate = |f: &FeatureMatrix| {
            let x = DMatrix::from_row_slice(f.rows(), 4, f.data()) * &q;
            let rows: Vec<Vec<f64>> = x.row_iter().map(|r| r.iter().copied().collect()).collect();
            FeatureMatrix::from_rows(&rows).unwrap()
        };
        let ra = gaussian_summary(&rotate(&fa)).unwrap();
        let rb = gaussian_summary(&rotate(&fb)).unwrap();
        assert!((fid(&ra, &rb).unwrap() - ab).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        let a = summary(&[0.0], &[1.0]);
        let b = summary(&[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]);
        assert!(fid(&a, &b).is_err());
        let bad = summary(&[0.0, 0.0], &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(fid(&bad, &b), Err(IqaError::Conditioning(_))));
    }

    #[test]
    fn rank_deficient_self_distance_is_zero() {
        // fewer samples than dimensions, with a spread of eigenvalue scales
        let scale: Vec<f64> = (0..40).map(|k| 10f64.powf(-(k as f64) / 8.0)).collect();
        let s = gaussian_summary(&random(25, 40, 7, &scale)).unwrap();
        assert!(fid(&s, &s).unwrap() < 1e-9);
    }
}
