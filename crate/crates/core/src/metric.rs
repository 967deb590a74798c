//! Name-based registry over every metric, used by the evaluation harness and
//! the command line.

use std::fmt;
use std::str::FromStr;

use crate::db::{pairwise_db, raw_features, DbMetric, DbParams};
use crate::error::{IqaError, Result};
use crate::fr;
use crate::image::Image;
use crate::nr::{self, BrisqueModel, TvNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricKind {
    FullReference,
    NoReference,
    DistributionBased,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Psnr,
    Ssim,
    MsSsim,
    IwSsim,
    Vifp,
    Gmsd,
    MsGmsd,
    MsGmsdc,
    Fsim,
    Fsimc,
    SrSim,
    SrSimc,
    Vsi,
    Mdsi,
    HaarPsi,
    Dss,
    Tv,
    Brisque,
    Fid,
    Kid,
    Msid,
}

impl MetricId {
    pub const ALL: [MetricId; 21] = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::MsSsim,
        MetricId::IwSsim,
        MetricId::Vifp,
        MetricId::Gmsd,
        MetricId::MsGmsd,
        MetricId::MsGmsdc,
        MetricId::Fsim,
        MetricId::Fsimc,
        MetricId::SrSim,
        MetricId::SrSimc,
        MetricId::Vsi,
        MetricId::Mdsi,
        MetricId::HaarPsi,
        MetricId::Dss,
        MetricId::Tv,
        MetricId::Brisque,
        MetricId::Fid,
        MetricId::Kid,
        MetricId::Msid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Psnr => "psnr",
            MetricId::Ssim => "ssim",
            MetricId::MsSsim => "ms_ssim",
            MetricId::IwSsim => "iw_ssim",
            MetricId::Vifp => "vifp",
            MetricId::Gmsd => "gmsd",
            MetricId::MsGmsd => "ms_gmsd",
            MetricId::MsGmsdc => "ms_gmsdc",
            MetricId::Fsim => "fsim",
            MetricId::Fsimc => "fsimc",
            MetricId::SrSim => "sr_sim",
            MetricId::SrSimc => "sr_simc",
            MetricId::Vsi => "vsi",
            MetricId::Mdsi => "mdsi",
            MetricId::HaarPsi => "haarpsi",
            MetricId::Dss => "dss",
            MetricId::Tv => "tv",
            MetricId::Brisque => "brisque",
            MetricId::Fid => "fid",
            MetricId::Kid => "kid",
            MetricId::Msid => "msid",
        }
    }

    pub fn kind(self) -> MetricKind {
        match self {
            MetricId::Tv | MetricId::Brisque => MetricKind::NoReference,
            MetricId::Fid | MetricId::Kid | MetricId::Msid => MetricKind::DistributionBased,
            _ => MetricKind::FullReference,
        }
    }

    pub fn needs_reference(self) -> bool {
        self.kind() != MetricKind::NoReference
    }

    /// Orientation of the score: `true` when larger values mean better quality.
    pub fn higher_is_better(self) -> bool {
        !matches!(
            self,
            MetricId::Gmsd
                | MetricId::MsGmsd
                | MetricId::MsGmsdc
                | MetricId::Mdsi
                | MetricId::Tv
                | MetricId::Brisque
                | MetricId::Fid
                | MetricId::Kid
                | MetricId::Msid
        )
    }

    /// Comma-separated list of registered names.
    pub fn catalog() -> String {
        MetricId::ALL
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Scores `distorted` (against `reference` for FR and DB metrics).
    pub fn compute(
        self,
        reference: Option<&Image>,
        distorted: &Image,
        ctx: &MetricContext,
    ) -> Result<f64> {
        let pair = || {
            reference.ok_or_else(|| {
                IqaError::InvalidArgument(format!(
                    "metric `{}` needs a reference image",
                    self.name()
                ))
            })
        };
        let fr_value = |s: Result<fr::FrScore>| s.map(|s| s.value);
        match self {
            MetricId::Psnr => fr_value(fr::psnr(pair()?, distorted)),
            MetricId::Ssim => fr_value(fr::ssim(pair()?, distorted)),
            MetricId::MsSsim => fr_value(fr::ms_ssim(pair()?, distorted)),
            MetricId::IwSsim => fr_value(fr::iw_ssim(pair()?, distorted)),
            MetricId::Vifp => fr_value(fr::vifp(pair()?, distorted)),
            MetricId::Gmsd => fr_value(fr::gmsd(pair()?, distorted)),
            MetricId::MsGmsd => fr_value(fr::ms_gmsd(pair()?, distorted, false)),
            MetricId::MsGmsdc => fr_value(fr::ms_gmsd(pair()?, distorted, true)),
            MetricId::Fsim => fr_value(fr::fsim(pair()?, distorted, false)),
            MetricId::Fsimc => fr_value(fr::fsim(pair()?, distorted, true)),
            MetricId::SrSim => fr_value(fr::sr_sim(pair()?, distorted, false)),
            MetricId::SrSimc => fr_value(fr::sr_sim(pair()?, distorted, true)),
            MetricId::Vsi => fr_value(fr::vsi(pair()?, distorted)),
            MetricId::Mdsi => fr_value(fr::mdsi(pair()?, distorted)),
            MetricId::HaarPsi => fr_value(fr::haarpsi(pair()?, distorted)),
            MetricId::Dss => fr_value(fr::dss(pair()?, distorted)),
            MetricId::Tv => nr::total_variation(distorted, ctx.tv_norm),
            MetricId::Brisque => {
                let model = ctx.brisque_model.as_ref().ok_or_else(|| {
                    IqaError::InvalidArgument("brisque needs an SVR model file".into())
                })?;
                nr::brisque(distorted, model)
            }
            MetricId::Fid | MetricId::Kid | MetricId::Msid => {
                let metric = match self {
                    MetricId::Fid => DbMetric::Fid,
                    MetricId::Kid => DbMetric::Kid,
                    _ => DbMetric::Msid,
                };
                let mut params = ctx.db.clone();
                params.kid.seed = ctx.seed;
                pairwise_db(metric, pair()?, distorted, raw_features, &params)
            }
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = IqaError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let key = match key.as_str() {
            "msssim" => "ms_ssim",
            "iwssim" => "iw_ssim",
            "vif" => "vifp",
            "msgmsd" => "ms_gmsd",
            "msgmsdc" => "ms_gmsdc",
            "srsim" => "sr_sim",
            "srsimc" => "sr_simc",
            other => other,
        };
        MetricId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == key)
            .ok_or_else(|| IqaError::UnknownMetric(s.to_string()))
    }
}

/// Everything besides the images that a metric evaluation may need.
#[derive(Clone, Debug, Default)]
pub struct MetricContext {
    pub brisque_model: Option<BrisqueModel>,
    /// Seed of every stochastic step (KID subsets).
    pub seed: u64,
    pub tv_norm: TvNorm,
    pub db: DbParams,
}
