use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{IqaError, Result};

/// Direction of the subjective scores in a manifest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Polarity {
    /// MOS-style: larger means better quality.
    #[default]
    HigherIsBetter,
    /// DMOS-style: larger means worse quality.
    LowerIsBetter,
}

impl Polarity {
    pub fn name(self) -> &'static str {
        match self {
            Polarity::HigherIsBetter => "higher_is_better",
            Polarity::LowerIsBetter => "lower_is_better",
        }
    }

    /// Multiplier that turns a value of this polarity into higher-is-better.
    pub fn sign(self) -> f64 {
        match self {
            Polarity::HigherIsBetter => 1.0,
            Polarity::LowerIsBetter => -1.0,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarity {
    type Err = IqaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "higher_is_better" | "mos" => Ok(Polarity::HigherIsBetter),
            "lower_is_better" | "dmos" => Ok(Polarity::LowerIsBetter),
            other => Err(IqaError::InvalidArgument(format!(
                "unknown polarity `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRecord {
    pub dist: PathBuf,
    pub reference: Option<PathBuf>,
    pub score: f64,
}

/// Distorted/reference/subjective-score triples.
///
/// On disk this is a UTF-8 CSV with the header `dist,ref,score`. Lines
/// starting with `#` are comments; a comment of the form
/// `# polarity=lower_is_better` declares DMOS-style scores. Relative paths
/// are resolved against the manifest's directory.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub records: Vec<ManifestRecord>,
    pub polarity: Polarity,
}

impl DatasetManifest {
    pub fn new(records: Vec<ManifestRecord>, polarity: Polarity) -> Result<Self> {
        if records.len() < 2 {
            return Err(IqaError::InvalidArgument(format!(
                "a manifest needs at least 2 records, got {}",
                records.len()
            )));
        }
        if let Some(r) = records.iter().find(|r| !r.score.is_finite()) {
            return Err(IqaError::InvalidArgument(format!(
                "non-finite subjective score for {}",
                r.dist.display()
            )));
        }
        Ok(DatasetManifest { records, polarity })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, path, base)
    }

    /// Parses manifest text; `origin` is only used in error messages.
    pub fn parse(text: &str, origin: &Path, base: &Path) -> Result<Self> {
        let err = |line: usize, message: String| IqaError::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut polarity = Polarity::default();
        for (i, line) in text.lines().enumerate() {
            let Some(comment) = line.trim_start().strip_prefix('#') else {
                continue;
            };
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "polarity" {
                    polarity = value
                        .parse()
                        .map_err(|e: IqaError| err(i + 1, e.to_string()))?;
                }
            }
        }

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(false)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| err(e.position().map_or(1, |p| p.line() as usize), e.to_string()))?
            .clone();
        let column = |name: &str| headers.iter().position(|h| h == name);
        let (Some(dist_col), Some(ref_col), Some(score_col)) =
            (column("dist"), column("ref"), column("score"))
        else {
            let line = text
                .lines()
                .position(|l| !l.trim_start().starts_with('#'))
                .map_or(1, |i| i + 1);
            return Err(err(line, "header must contain `dist,ref,score`".into()));
        };

        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        let mut records = Vec::new();
        for row in reader.records() {
            let row =
                row.map_err(|e| err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            let dist = &row[dist_col];
            if dist.is_empty() {
                return Err(err(line, "empty `dist` path".into()));
            }
            let score: f64 = row[score_col]
                .parse()
                .map_err(|_| err(line, format!("invalid score `{}`", &row[score_col])))?;
            if !score.is_finite() {
                return Err(err(line, format!("non-finite score `{}`", &row[score_col])));
            }
            let reference = Some(&row[ref_col]).filter(|r| !r.is_empty()).map(resolve);
            records.push(ManifestRecord {
                dist: resolve(dist),
                reference,
                score,
            });
        }
        Self::new(records, polarity).map_err(|e| err(0, e.to_string()))
    }

    /// Writes the manifest with paths exactly as stored.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = Vec::new();
        if self.polarity != Polarity::HigherIsBetter {
            writeln!(out, "# polarity={}", self.polarity).map_err(io)?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let csv_err = |e: csv::Error| IqaError::InvalidArgument(e.to_string());
            w.write_record(["dist", "ref", "score"]).map_err(csv_err)?;
            for r in &self.records {
                let reference = r
                    .reference
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default();
                w.write_record([
                    r.dist.display().to_string(),
                    reference,
                    format!("{:?}", r.score),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        std::fs::write(path, out).map_err(io)
    }
}
