//! No-reference metrics: total variation and BRISQUE.

mod brisque;
mod model;
mod tv;

pub use brisque::{
    brisque, brisque_features, brisque_score, fit_aggd, fit_ggd, mscn_coefficients, AggdFit,
    BrisqueFeatures, BRISQUE_FEATURES, BRISQUE_MIN_SIDE,
};
pub use model::BrisqueModel;
pub use tv::{total_variation, total_variation_plane, TvNorm};
