use std::path::PathBuf;

/// Coarse classification used by front-ends to map failures onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// The caller asked for something that cannot work (bad arity, unknown metric).
    Usage,
    /// Input data is unreadable, malformed or inconsistent.
    InputData,
    /// A numerical routine hit a degenerate or ill-conditioned case.
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum IqaError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to decode image {path}: {message}")]
    Decode { path: PathBuf, message: String },

    #[error("unsupported bit depth {depth} in {path}")]
    UnsupportedBitDepth { path: PathBuf, depth: u8 },

    #[error("unsupported channel layout in {path}: {layout}")]
    UnsupportedLayout { path: PathBuf, layout: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("expected a {expected}-channel image, got {actual} channel(s)")]
    InvalidArity { expected: usize, actual: usize },

    #[error("image dimensions differ: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize, usize), (usize, usize, usize)),

    #[error("{what} requires at least {min_height}x{min_width} pixels, got {height}x{width}")]
    TooSmall {
        what: &'static str,
        min_height: usize,
        min_width: usize,
        height: usize,
        width: usize,
    },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ill-conditioned matrix: {0}")]
    Conditioning(String),

    #[error("non-finite result in {0}")]
    NonFinite(&'static str),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("data integrity: {0}")]
    DataIntegrity(String),
}

impl IqaError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            IqaError::InvalidArity { .. }
            | IqaError::InvalidArgument(_)
            | IqaError::UnknownMetric(_)
            | IqaError::InvalidKernel(_) => ErrorKind::Usage,
            IqaError::Degenerate(_) | IqaError::Conditioning(_) | IqaError::NonFinite(_) => {
                ErrorKind::Numerical
            }
            _ => ErrorKind::InputData,
        }
    }
}

pub type Result<T, E = IqaError> = std::result::Result<T, E>;
