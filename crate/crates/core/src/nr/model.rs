use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::BRISQUE_FEATURES;
use crate::error::{IqaError, Result};

const HEADER: &str = "brisque-svr v1";

/// RBF-kernel support vector regressor with libsvm-style `[-1, 1]` feature
/// scaling.
///
/// Text format (UTF-8, `.` as decimal separator, blank lines and `#`
/// comments ignored):
///
/// ```text
/// brisque-svr v1
/// gamma <γ> rho <ρ>
/// range <min> <max>        # 36 lines, one per feature
/// <coef> <36 values>       # one line per support vector
/// ```
///
/// Support vectors live in the scaled space. The prediction is
/// `Σ coefᵢ · exp(−γ ‖svᵢ − x̂‖²) − ρ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrisqueModel {
    gamma: f64,
    rho: f64,
    ranges: Vec<(f64, f64)>,
    support_vectors: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
}

impl BrisqueModel {
    pub fn new(
        gamma: f64,
        rho: f64,
        ranges: Vec<(f64, f64)>,
        support_vectors: Vec<Vec<f64>>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        let bad = |m: String| Err(IqaError::InvalidArgument(m));
        if !(gamma.is_finite() && gamma > 0.0) || !rho.is_finite() {
            return bad(format!(
                "gamma must be positive and rho finite, got {gamma}, {rho}"
            ));
        }
        if ranges.is_empty() {
            return bad("model needs at least one feature range".into());
        }
        if let Some(i) = ranges
            .iter()
            .position(|(lo, hi)| lo >= hi || !lo.is_finite() || !hi.is_finite())
        {
            return bad(format!("feature {i}: range min must be below max"));
        }
        if support_vectors.len() != coefficients.len() {
            return bad(format!(
                "{} support vectors but {} coefficients",
                support_vectors.len(),
                coefficients.len()
            ));
        }
        if let Some(sv) = support_vectors.iter().find(|sv| sv.len() != ranges.len()) {
            return bad(format!(
                "support vector of length {} for {} features",
                sv.len(),
                ranges.len()
            ));
        }
        if support_vectors
            .iter()
            .flatten()
            .chain(&coefficients)
            .any(|v| !v.is_finite())
        {
            return bad("model contains non-finite values".into());
        }
        Ok(Self {
            gamma,
            rho,
            ranges,
            support_vectors,
            coefficients,
        })
    }

    pub fn dimension(&self) -> usize {
        self.ranges.len()
    }

    pub fn support_vector_count(&self) -> usize {
        self.support_vectors.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Maps raw features onto `[-1, 1]` with the model's ranges.
    pub fn scale(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.dimension() {
            return Err(IqaError::InvalidArgument(format!(
                "model expects {} features, got {}",
                self.dimension(),
                features.len()
            )));
        }
        Ok(features
            .iter()
            .zip(&self.ranges)
            .map(|(x, (lo, hi))| -1.0 + 2.0 * (x - lo) / (hi - lo))
            .collect())
    }

    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        let x = self.scale(features)?;
        let mut acc = 0.0;
        for (sv, coef) in self.support_vectors.iter().zip(&self.coefficients) {
            let d2: f64 = sv.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += coef * (-self.gamma * d2).exp();
        }
        Ok(acc - self.rho)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Parses the text format; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| IqaError::Parse {
            path: PathBuf::from(origin),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let number = |line: usize, tok: &str| -> Result<f64> {
            tok.parse::<f64>()
                .map_err(|_| err(line, format!("`{tok}` is not a number")))
        };

        match lines.next() {
            Some((_, HEADER)) => {}
            Some((n, other)) => {
                return Err(err(n, format!("expected `{HEADER}`, found `{other}`")))
            }
            None => return Err(err(0, "empty model file".into())),
        }
        let (n, params) = lines
            .next()
            .ok_or_else(|| err(0, "missing gamma/rho line".into()))?;
        let tokens: Vec<&str> = params.split_whitespace().collect();
        let (gamma, rho) = match tokens.as_slice() {
            ["gamma", g, "rho", r] => (number(n, g)?, number(n, r)?),
            _ => return Err(err(n, "expected `gamma <f> rho <f>`".into())),
        };
        let mut ranges = Vec::with_capacity(BRISQUE_FEATURES);
        for _ in 0..BRISQUE_FEATURES {
            let (n, l) = lines
                .next()
                .ok_or_else(|| err(0, format!("expected {BRISQUE_FEATURES} range lines")))?;
            let t: Vec<&str> = l.split_whitespace().collect();
            match t.as_slice() {
                ["range", lo, hi] => ranges.push((number(n, lo)?, number(n, hi)?)),
                _ => return Err(err(n, "expected `range <min> <max>`".into())),
            }
        }
        let mut support_vectors = Vec::new();
        let mut coefficients = Vec::new();
        let mut last_line = 0;
        for (n, l) in lines {
            last_line = n;
            let values = l
                .split_whitespace()
                .map(|t| number(n, t))
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != BRISQUE_FEATURES + 1 {
                return Err(err(
                    n,
                    format!(
                        "support vector line needs {} numbers, found {}",
                        BRISQUE_FEATURES + 1,
                        values.len()
                    ),
                ));
            }
            coefficients.push(values[0]);
            support_vectors.push(values[1..].to_vec());
        }
        Self::new(gamma, rho, ranges, support_vectors, coefficients)
            .map_err(|e| err(last_line, e.to_string()))
    }

    /// Serializes to the text format; `parse` round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut s = format!("{HEADER}\ngamma {:?} rho {:?}\n", self.gamma, self.rho);
        for (lo, hi) in &self.ranges {
            let _ = writeln!(s, "range {lo:?} {hi:?}");
        }
        for (sv, coef) in self.support_vectors.iter().zip(&self.coefficients) {
            let _ = write!(s, "{coef:?}");
            for v in sv {
                let _ = write!(s, " {v:?}");
            }
            s.push('\n');
        }
        s
    }
}
