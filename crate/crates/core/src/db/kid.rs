use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FeatureMatrix;
use crate::error::{IqaError, Result};

/// Subsampling settings of [`kid`].
#[derive(Clone, Debug, PartialEq)]
pub struct KidParams {
    pub subsets: usize,
    /// `None` means `min(1000, Na, Nb)`.
    pub subset_size: Option<usize>,
    pub seed: u64,
}

impl Default for KidParams {
    fn default() -> Self {
        Self {
            subsets: 50,
            subset_size: None,
            seed: 0,
        }
    }
}

/// Mean and population standard deviation of the per-subset estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KidScore {
    pub mean: f64,
    pub std: f64,
}

/// `(xᵀy / D + 1)³`
pub fn polynomial_kernel(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (dot / x.len() as f64 + 1.0).powi(3)
}

fn unbiased_mmd2(x: &FeatureMatrix, y: &FeatureMatrix) -> f64 {
    let m = x.rows() as f64;
    let within = |f: &FeatureMatrix| {
        let mut s = 0.0;
        for i in 0..f.rows() {
            for j in i + 1..f.rows() {
                s += polynomial_kernel(f.row(i), f.row(j));
            }
        }
        2.0 * s
    };
    let mut cross = 0.0;
    for i in 0..x.rows() {
        for j in 0..y.rows() {
            cross += polynomial_kernel(x.row(i), y.row(j));
        }
    }
    (within(x) + within(y)) / (m * (m - 1.0)) - 2.0 * cross / (m * m)
}

/// Kernel inception distance: unbiased squared MMD with the cubic polynomial
/// kernel, averaged over random equal-size subsets of both sets.
///
/// Subsets are drawn without replacement from a ChaCha8 stream seeded with
/// `params.seed`, first from `fa` then from `fb` for each subset.
pub fn kid(fa: &FeatureMatrix, fb: &FeatureMatrix, params: &KidParams) -> Result<KidScore> {
    if fa.cols() != fb.cols() {
        return Err(IqaError::InvalidArgument(format!(
            "feature dimensions differ: {} vs {}",
            fa.cols(),
            fb.cols()
        )));
    }
    let limit = fa.rows().min(fb.rows());
    let m = params.subset_size.unwrap_or(limit.min(1000));
    if m > limit || m < 2 {
        return Err(IqaError::InvalidArgument(format!(
            "KID subset size {m} must be in 2..={limit}"
        )));
    }
    if params.subsets == 0 {
        return Err(IqaError::InvalidArgument(
            "KID needs at least one subset".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let estimates: Vec<f64> = (0..params.subsets)
        .map(|_| {
            let ia = sample(&mut rng, fa.rows(), m).into_vec();
            let ib = sample(&mut rng, fb.rows(), m).into_vec();
            unbiased_mmd2(&fa.select(&ia), &fb.select(&ib))
        })
        .collect();
    let mean = crate::stats::mean(&estimates);
    let std = crate::stats::std_population(&estimates);
    if !mean.is_finite() {
        return Err(IqaError::NonFinite("KID"));
    }
    Ok(KidScore { mean, std })
}
