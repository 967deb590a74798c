use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{IqaError, Result};

const MAGIC: &[u8; 4] = b"FMX1";

/// `N × D` matrix of per-sample features, row-major.
///
/// On disk it is either binary (`FMX1` magic, little-endian `u32` N and D,
/// then `N·D` little-endian `f32`) or CSV with one sample per row and an
/// optional header line.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(IqaError::InvalidArgument(
                "feature matrix must be non-empty".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(IqaError::InvalidArgument(format!(
                "{rows}x{cols} feature matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(IqaError::DataIntegrity(
                "feature matrix contains non-finite values".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(IqaError::InvalidArgument("ragged feature rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// New matrix made of the given rows, in order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        let data = indices
            .iter()
            .flat_map(|&i| self.row(i).iter().copied())
            .collect();
        FeatureMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Reads either format, detected by the magic bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if bytes.starts_with(MAGIC) {
            Self::decode_binary(&bytes, path)
        } else {
            Self::decode_csv(&bytes, path)
        }
    }

    fn decode_binary(bytes: &[u8], path: &Path) -> Result<Self> {
        let corrupt = |m: String| IqaError::DataIntegrity(format!("{}: {m}", path.display()));
        if bytes.len() < 12 {
            return Err(corrupt("truncated header".into()));
        }
        let word =
            |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
        let (n, d) = (word(4), word(8));
        let expected = n
            .checked_mul(d)
            .and_then(|v| v.checked_mul(4))
            .and_then(|v| v.checked_add(12))
            .ok_or_else(|| corrupt("dimensions overflow".into()))?;
        if bytes.len() != expected {
            return Err(corrupt(format!(
                "{n}x{d} matrix needs {expected} bytes, file has {}",
                bytes.len()
            )));
        }
        let data = bytes[12..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
            .collect();
        Self::new(n, d, data).map_err(|e| corrupt(e.to_string()))
    }

    fn decode_csv(bytes: &[u8], path: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| IqaError::Parse {
            path: PathBuf::from(path),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(bytes);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| parse_err(i + 1, e.to_string()))?;
            let values: std::result::Result<Vec<f64>, _> =
                record.iter().map(str::parse::<f64>).collect();
            match values {
                Ok(v) => rows.push(v),
                Err(_) if i == 0 => continue,
                Err(e) => return Err(parse_err(i + 1, e.to_string())),
            }
        }
        if rows.is_empty() {
            return Err(parse_err(0, "no feature rows".into()));
        }
        Self::from_rows(&rows).map_err(|e| parse_err(0, e.to_string()))
    }

    /// Writes the binary format; values are narrowed to `f32`.
    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        };
        let dims = |v: usize| {
            u32::try_from(v)
                .map_err(|_| IqaError::InvalidArgument("matrix too large for FMX1".into()))
        };
        let mut out = BufWriter::new(fs::File::create(path).map_err(io)?);
        out.write_all(MAGIC).map_err(io)?;
        out.write_all(&dims(self.rows)?.to_le_bytes()).map_err(io)?;
        out.write_all(&dims(self.cols)?.to_le_bytes()).map_err(io)?;
        for v in &self.data {
            out.write_all(&(*v as f32).to_le_bytes()).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    /// Writes CSV without a header.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| IqaError::Io {
            path: path.to_path_buf(),
            source: e.into(),
        })?;
        for i in 0..self.rows {
            w.write_record(self.row(i).iter().map(|v| format!("{v:?}")))
                .map_err(|e| IqaError::Io {
                    path: path.to_path_buf(),
                    source: e.into(),
                })?;
        }
        w.flush().map_err(|source| IqaError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
