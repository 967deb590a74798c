//! Classical image quality metrics.
//!
//! * [`fr`]: full-reference metrics (PSNR, the SSIM family, VIFp, the GMSD
//!   family, FSIM, SR-SIM, VSI, MDSI, HaarPSI, DSS).
//! * [`nr`]: no-reference metrics (total variation, BRISQUE).
//! * [`db`]: distribution-based metrics over feature matrices (FID, KID, IS,
//!   MSID) and the patch-distribution comparison of two images.
//! * [`eval`]: rank correlations, dataset-manifest evaluation and timing.
//!
//! Images are planar `f64` rasters normalized to `[0, 1]`; see [`Image`].

pub mod db;
pub mod dct;
pub mod error;
pub mod eval;
pub mod fft;
pub mod filter;
pub mod fr;
pub mod image;
pub mod metric;
pub mod nr;
pub mod phase;
pub mod pyramid;
pub mod stats;
pub mod synthetic;
pub mod wavelet;

pub use db::{FeatureMatrix, GaussianSummary, PatchSet};
pub use error::{ErrorKind, IqaError, Result};
pub use eval::{BenchReport, CorrelationReport, DatasetManifest};
pub use fr::{FrScore, ScaleWeights};
pub use image::{load_image, save_image, Image, Plane};
pub use metric::{MetricContext, MetricId, MetricKind};
pub use nr::{BrisqueFeatures, BrisqueModel};
