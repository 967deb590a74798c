use crate::error::{IqaError, Result};

/// Ascending ranks starting at 1; tied values share the mean of the ranks
/// they span.
pub fn rank(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

fn check(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(IqaError::InvalidArgument(format!(
            "correlation inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(IqaError::InvalidArgument(format!(
            "correlation needs at least {min} samples, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(IqaError::NonFinite("correlation input"));
    }
    Ok(())
}

fn has_ties(v: &[f64]) -> bool {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.windows(2).any(|w| w[0] == w[1])
}

/// Pearson linear correlation, without any nonlinear pre-fitting.
pub fn plcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y, 2)?;
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(IqaError::Degenerate(
            "correlation of a constant vector".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// `1 − 6 Σ d² / (n (n² − 1))`; exact only when neither input has ties.
pub fn srcc_closed_form(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y, 3)?;
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(1.0 - 6.0 * d2 / (n * (n * n - 1.0)))
}

/// Pearson correlation of average ranks.
pub fn srcc_ranked(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y, 3)?;
    plcc(&rank(x), &rank(y))
}

/// Spearman rank correlation: the closed form for tie-free inputs, Pearson
/// on average ranks otherwise.
pub fn srcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y, 3)?;
    if has_ties(x) || has_ties(y) {
        srcc_ranked(x, y)
    } else {
        srcc_closed_form(x, y)
    }
}

/// Kendall τ-b with tie correction, by direct pair enumeration.
pub fn krcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y, 2)?;
    let n = x.len();
    let (mut concordant, mut discordant) = (0i64, 0i64);
    let (mut ties_x, mut ties_y) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 && dy == 0.0 {
                ties_x += 1;
                ties_y += 1;
            } else if dx == 0.0 {
                ties_x += 1;
            } else if dy == 0.0 {
                ties_y += 1;
            } else if (dx > 0.0) == (dy > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let pairs = (n * (n - 1) / 2) as i64;
    let denom = (((pairs - ties_x) as f64) * ((pairs - ties_y) as f64)).sqrt();
    if denom == 0.0 {
        return Err(IqaError::Degenerate(
            "correlation of a constant vector".into(),
        ));
    }
    Ok(((concordant - discordant) as f64 / denom).clamp(-1.0, 1.0))
}
