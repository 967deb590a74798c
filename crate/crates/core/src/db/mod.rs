//! Distribution-based metrics over feature matrices, and the patch-based
//! comparison of a single image pair.
//!
//! Feature extraction is pluggable: anything that turns a [`PatchSet`] into a
//! [`FeatureMatrix`] can drive [`pairwise_db`]. [`raw_features`] is a small
//! hand-crafted extractor for testing the pipeline end to end.

mod features;
mod fid;
mod inception;
mod kid;
mod msid;
mod patch;

pub use features::FeatureMatrix;
pub use fid::{fid, gaussian_summary, GaussianSummary};
pub use inception::inception_score;
pub use kid::{kid, polynomial_kernel, KidParams, KidScore};
pub use msid::{heat_trace, msid, MsidParams};
pub use patch::{patchify, raw_features, PatchSet, PATCH_SIZE, PATCH_STRIDE, RAW_FEATURE_DIM};

use std::fmt;
use std::str::FromStr;

use crate::error::{IqaError, Result};
use crate::image::Image;

/// Distribution metric used by [`pairwise_db`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DbMetric {
    Fid,
    Kid,
    Msid,
}

impl FromStr for DbMetric {
    type Err = IqaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fid" => Ok(DbMetric::Fid),
            "kid" => Ok(DbMetric::Kid),
            "msid" => Ok(DbMetric::Msid),
            _ => Err(IqaError::UnknownMetric(s.to_string())),
        }
    }
}

impl fmt::Display for DbMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DbMetric::Fid => "fid",
            DbMetric::Kid => "kid",
            DbMetric::Msid => "msid",
        })
    }
}

/// Settings of the distribution metrics when applied to patch features.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DbParams {
    pub kid: KidParams,
    pub msid: MsidParams,
}

/// Compares two images as distributions of their 96×96 patches.
///
/// KID reports the mean over subsets.
pub fn pairwise_db<F>(
    metric: DbMetric,
    reference: &Image,
    distorted: &Image,
    extractor: F,
    params: &DbParams,
) -> Result<f64>
where
    F: Fn(&PatchSet) -> Result<FeatureMatrix>,
{
    let fa = extractor(&patchify(reference)?)?;
    let fb = extractor(&patchify(distorted)?)?;
    match metric {
        DbMetric::Fid => fid(&gaussian_summary(&fa)?, &gaussian_summary(&fb)?),
        DbMetric::Kid => Ok(kid(&fa, &fb, &params.kid)?.mean),
        DbMetric::Msid => msid(&fa, &fb, &params.msid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn identical_images_have_zero_fid() {
        let img = synthetic::natural(160, 128, 3);
        let v = pairwise_db(
            DbMetric::Fid,
            &img,
            &img,
            raw_features,
            &DbParams::default(),
        )
        .unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn patch_rows_follow_patchify() {
        let img = synthetic::natural(128, 128, 1);
        let f = raw_features(&patchify(&img).unwrap()).unwrap();
        assert_eq!(f.rows(), 4);
    }

    #[test]
    fn fid_grows_with_noise() {
        let img = synthetic::natural(192, 192, 1);
        let scores: Vec<f64> = [0.05, 0.1, 0.2]
            .iter()
            .map(|&s| {
                let d = synthetic::with_gaussian_noise(&img, s, 17);
                pairwise_db(DbMetric::Fid, &img, &d, raw_features, &DbParams::default()).unwrap()
            })
            .collect();
        assert!(
            scores[0] <= scores[1] && scores[1] <= scores[2],
            "{scores:?}"
        );
    }

    #[test]
    fn metric_names() {
        assert_eq!("KID".parse::<DbMetric>().unwrap(), DbMetric::Kid);
        assert!("is".parse::<DbMetric>().is_err());
    }
}
