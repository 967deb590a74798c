use super::FeatureMatrix;
use crate::error::{IqaError, Result};

const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Inception score of class-probability rows: `exp(mean_i KL(p_i ‖ p̄))`,
/// computed per split of consecutive rows.
///
/// Returns the mean and population standard deviation over splits. With
/// `C` classes the score lies in `[1, C]`.
pub fn inception_score(probs: &FeatureMatrix, splits: usize) -> Result<(f64, f64)> {
    let n = probs.rows();
    if splits == 0 || splits > n {
        return Err(IqaError::InvalidArgument(format!(
            "split count must be in 1..={n}, got {splits}"
        )));
    }
    for i in 0..n {
        let row = probs.row(i);
        let sum: f64 = row.iter().sum();
        if row.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(IqaError::DataIntegrity(format!(
                "row {i} is not a probability vector (sum {sum})"
            )));
        }
    }
    let c = probs.cols();
    let scores: Vec<f64> = (0..splits)
        .map(|s| {
            let (lo, hi) = (s * n / splits, (s + 1) * n / splits);
            let mut marginal = vec![0.0; c];
            for i in lo..hi {
                for (m, p) in marginal.iter_mut().zip(probs.row(i)) {
                    *m += p;
                }
            }
            let count = (hi - lo) as f64;
            marginal.iter_mut().for_each(|m| *m /= count);
            let kl: f64 = (lo..hi)
                .map(|i| {
                    probs
                        .row(i)
                        .iter()
                        .zip(&marginal)
                        .filter(|(p, _)| **p > 0.0)
                        .map(|(p, m)| p * (p / m).ln())
                        .sum::<f64>()
                })
                .sum();
            (kl / count).exp()
        })
        .collect();
    Ok((
        crate::stats::mean(&scores),
        crate::stats::std_population(&scores),
    ))
}
