use nalgebra::{DMatrix, SymmetricEigen};

use super::FeatureMatrix;
use crate::error::{IqaError, Result};

/// Graph and time-grid settings of [`msid`].
#[derive(Clone, Debug, PartialEq)]
pub struct MsidParams {
    pub k_neighbors: usize,
    pub timestamps: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for MsidParams {
    fn default() -> Self {
        Self {
            k_neighbors: 5,
            timestamps: 256,
            t_min: 0.1,
            t_max: 10.0,
        }
    }
}

impl MsidParams {
    /// Log-spaced time grid from `t_min` to `t_max` inclusive.
    pub fn times(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.log10(), self.t_max.log10());
        let n = self.timestamps;
        if n == 1 {
            return vec![self.t_min];
        }
        (0..n)
            .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 || self.timestamps == 0 {
            return Err(IqaError::InvalidArgument(
                "MSID needs k ≥ 1 and at least one timestamp".into(),
            ));
        }
        if !(self.t_min > 0.0 && self.t_max >= self.t_min && self.t_max.is_finite()) {
            return Err(IqaError::InvalidArgument(format!(
                "invalid MSID time range [{}, {}]",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }
}

/// Symmetric 0/1 adjacency of the k-nearest-neighbour graph (Euclidean,
/// ties broken by row index, union of both directions).
fn knn_adjacency(f: &FeatureMatrix, k: usize) -> Result<DMatrix<f64>> {
    let n = f.rows();
    if n < k + 1 {
        return Err(IqaError::InvalidArgument(format!(
            "kNN graph with k = {k} needs at least {} samples, got {n}",
            k + 1
        )));
    }
    let mut adj = DMatrix::zeros(n, n);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        dist.clear();
        for j in (0..n).filter(|&j| j != i) {
            let d: f64 = f
                .row(i)
                .iter()
                .zip(f.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist.push((d, j));
        }
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &dist[..k] {
            adj[(i, j)] = 1.0;
            adj[(j, i)] = 1.0;
        }
    }
    Ok(adj)
}

/// `I − D^{-1/2} A D^{-1/2}`; isolated vertices get a zero row.
pub(crate) fn normalized_laplacian(adj: &DMatrix<f64>) -> DMatrix<f64> {
    let n = adj.nrows();
    let inv_sqrt: Vec<f64> = adj
        .row_iter()
        .map(|r| {
            let d = r.sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j && inv_sqrt[i] > 0.0 {
            1.0
        } else {
            0.0
        };
        id - inv_sqrt[i] * adj[(i, j)] * inv_sqrt[j]
    })
}

fn spectrum(f: &FeatureMatrix, k: usize) -> Result<Vec<f64>> {
    let lap = normalized_laplacian(&knn_adjacency(f, k)?);
    let eig = SymmetricEigen::new(lap);
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(IqaError::NonFinite("Laplacian spectrum"));
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

fn trace_exp(eigenvalues: &[f64], t: f64) -> f64 {
    eigenvalues.iter().map(|l| (-t * l).exp()).sum()
}

/// Per-vertex heat trace `tr(exp(−tL)) / N` of the kNN-graph normalized
/// Laplacian at each time in `times`.
pub fn heat_trace(f: &FeatureMatrix, k: usize, times: &[f64]) -> Result<Vec<f64>> {
    let eig = spectrum(f, k)?;
    let n = f.rows() as f64;
    Ok(times.iter().map(|&t| trace_exp(&eig, t) / n).collect())
}

/// Multi-scale intrinsic distance between two feature sets.
///
/// Each heat trace is divided by that of an empty graph of the same size,
/// `N (1 + (e^{−t} − 1) / N)`, and multiplied by `t`. The score is the largest
/// gap between the two curves, weighted by `exp(−2 (t + 1/t))`.
pub fn msid(fa: &FeatureMatrix, fb: &FeatureMatrix, params: &MsidParams) -> Result<f64> {
    params.validate()?;
    let times = params.times();
    let curve = |f: &FeatureMatrix| -> Result<Vec<f64>> {
        let eig = spectrum(f, params.k_neighbors)?;
        let n = f.rows() as f64;
        Ok(times
            .iter()
            .map(|&t| t * trace_exp(&eig, t) / (n * (1.0 + ((-t).exp() - 1.0) / n)))
            .collect())
    };
    let (a, b) = (curve(fa)?, curve(fb)?);
    let score = times
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(&t, (x, y))| (-2.0 * (t + 1.0 / t)).exp() * (x - y).abs())
        .fold(0.0, f64::max);
    Ok(score)
}
