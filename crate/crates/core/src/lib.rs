//! Hurst exponent estimation from non-decimated wavelet transforms using
//! general trimean statistics of wavelet mid-energies.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the pure
//! numerical pieces:
//!
//! - [`trimean`]: floor-rule sample quantiles, the general trimean
//!   estimator, its asymptotic mean/variance factors and optimal weights.
//! - [`wavelet`]: the Pollen 4-tap filter family and a periodic à trous
//!   non-decimated transform.
//! - [`estimators`]: the six trimean-based Hurst estimators and the four
//!   baselines (VA, SSB, MEDL, MEDLA).
//! - [`fgn`]: fractional Gaussian noise autocovariance.
//!
//! Synthesis, file formats and the command line live in the `hurst` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod estimators;
pub mod fgn;
pub mod signal;
pub mod special;
pub mod trimean;
pub mod wavelet;

pub use error::{Error, Result};
pub use estimators::{
    estimate_baseline, estimate_from_pyramid, estimate_hurst, level_group_statistic, mid_energies,
    ols_slope, partition_strided, EstimatorConfig, GroupedStatistics, HurstEstimate, Method,
    MethodFamily, MidEnergyLevel, StatisticKind, WeightSource,
};
pub use signal::{Origin, Signal};
pub use trimean::{
    general_trimean, general_trimean_in_place, gtlme_asymptotics, gtme_asymptotics,
    optimal_gtlme_weights, optimal_gtme_weights, quantile_asymptotic_cov, sample_quantile,
    AsymptoticContext, AsymptoticSummary, CovMatrix, QuantileSpec, TrimeanWeights,
};
pub use wavelet::{ndwt_forward, pollen_filter, CoefficientPyramid, LevelOrder, PollenFilter};
