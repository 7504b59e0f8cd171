//! Hurst exponent estimators built on non-decimated wavelet coefficients.
//!
//! The six trimean methods work on mid-energies
//! `D_{j,k} = (d²_{j,k} + d²_{j,k+N/2}) / 2`, `k < N/2`. Each level's
//! mid-energies are split into `M` strided groups, a general trimean is
//! taken per group, and per-group slopes across levels are averaged:
//!
//! | family | response `y_{j,i}` | `Ĥ` from mean slope `β̄` |
//! |---|---|---|
//! | GTME, TTME, GME | `log₂ μ̂_{j,i}` of `D` | `−β̄/2 − 1/2` |
//! | GTLME, TTLME, GLME | `μ̂_{j,i}` of `ln D` | `−β̄/(2 ln 2) − 1/2` |
//!
//! The baselines use every coefficient of a level and fit one line:
//!
//! - VA: bias-corrected `log₂` of the mean squared coefficient, weighted
//!   least squares, `Ĥ = −(β+1)/2`.
//! - SSB: mean of `log₂ D`, `Ĥ = −(β+1)/2`.
//! - MEDL: median of `ln d²`, `Ĥ = −β/(2 ln 2) − 1/2`.
//! - MEDLA: median of `ln D` with the same `(k, k+N/2)` pairing,
//!   `Ĥ = −β/(2 ln 2) − 1/2`.
//!
//! Zero energies inside a logarithm are replaced by
//! `max · 1e−300` for that level and counted in the diagnostics.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
use core::fmt;
use core::str::FromStr;

use crate::math::{ln, log2};
use crate::special::{digamma, hurwitz_zeta2};
use crate::trimean::{
    general_trimean_in_place, optimal_gtlme_weights, optimal_gtme_weights, sample_quantile,
    TrimeanWeights,
};
use crate::wavelet::{ndwt_forward, pollen_filter, CoefficientPyramid};
use crate::{Error, Result, Signal};

/// Relative floor applied to zero energies before taking logarithms.
pub const LOG_FLOOR_FACTOR: f64 = 1e-300;

/// Bracket width used when resolving the GTLME optimum.
pub const GTLME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Gtme,
    Gtlme,
    Ttme,
    Gme,
    Ttlme,
    Glme,
    Va,
    Ssb,
    Medl,
    Medla,
}

/// How a method turns coefficients into a level response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodFamily {
    MidEnergy,
    LogMidEnergy,
    Baseline,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Va,
        Method::Ssb,
        Method::Medl,
        Method::Medla,
        Method::Ttme,
        Method::Gme,
        Method::Ttlme,
        Method::Glme,
        Method::Gtme,
        Method::Gtlme,
    ];

    pub const TRIMEAN: [Method; 6] = [
        Method::Ttme,
        Method::Gme,
        Method::Ttlme,
        Method::Glme,
        Method::Gtme,
        Method::Gtlme,
    ];

    pub const BASELINES: [Method; 4] = [Method::Va, Method::Ssb, Method::Medl, Method::Medla];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gtme => "GTME",
            Method::Gtlme => "GTLME",
            Method::Ttme => "TTME",
            Method::Gme => "GME",
            Method::Ttlme => "TTLME",
            Method::Glme => "GLME",
            Method::Va => "VA",
            Method::Ssb => "SSB",
            Method::Medl => "MEDL",
            Method::Medla => "MEDLA",
        }
    }

    pub fn family(self) -> MethodFamily {
        match self {
            Method::Gtme | Method::Ttme | Method::Gme => MethodFamily::MidEnergy,
            Method::Gtlme | Method::Ttlme | Method::Glme => MethodFamily::LogMidEnergy,
            Method::Va | Method::Ssb | Method::Medl | Method::Medla => MethodFamily::Baseline,
        }
    }

    pub fn is_baseline(self) -> bool {
        self.family() == MethodFamily::Baseline
    }

    /// Weights a trimean method uses unless overridden.
    pub fn default_weights(self) -> Option<TrimeanWeights> {
        match self {
            Method::Gtme => Some(optimal_gtme_weights()),
            Method::Gtlme => {
                Some(optimal_gtlme_weights(GTLME_TOLERANCE).expect("tolerance is positive"))
            }
            Method::Ttme | Method::Ttlme => Some(TrimeanWeights::TUKEY),
            Method::Gme | Method::Glme => Some(TrimeanWeights::GASTWIRTH),
            _ => None,
        }
    }

    /// Maps a regression slope over levels to `Ĥ`.
    pub fn slope_to_h(self, slope: f64) -> f64 {
        match self {
            Method::Gtme | Method::Ttme | Method::Gme | Method::Va | Method::Ssb => {
                -slope / 2.0 - 0.5
            }
            Method::Gtlme | Method::Ttlme | Method::Glme | Method::Medl | Method::Medla => {
                -slope / (2.0 * LN_2) - 0.5
            }
        }
    }

    fn statistic_kind(self) -> StatisticKind {
        match self {
            Method::Gtme | Method::Ttme | Method::Gme => StatisticKind::TrimeanMidEnergy,
            Method::Gtlme | Method::Ttlme | Method::Glme => StatisticKind::TrimeanLogMidEnergy,
            Method::Va => StatisticKind::Log2MeanSq,
            Method::Ssb => StatisticKind::MeanLog2MidEnergy,
            Method::Medl => StatisticKind::MedianLogSq,
            Method::Medla => StatisticKind::MedianLogMidEnergy,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod;

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown method (expected one of gtme, gtlme, ttme, gme, ttlme, glme, va, ssb, medl, medla)")
    }
}

impl core::error::Error for UnknownMethod {}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownMethod)
    }
}

/// Which trimean weights an estimate uses.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WeightSource {
    /// Optimal weights for GTME/GTLME, Tukey for TTME/TTLME, Gastwirth for
    /// GME/GLME.
    MethodDefault,
    Custom(TrimeanWeights),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimatorConfig {
    pub method: Method,
    /// Pollen angle in radians.
    pub wavelet_angle: f64,
    /// Decomposition depth `J`.
    pub levels: usize,
    /// Inclusive range of levels entering the regression.
    pub level_range: (usize, usize),
    /// Number of strided groups `M` (trimean methods only).
    pub groups: usize,
    pub weights: WeightSource,
}

impl EstimatorConfig {
    /// Haar, `J = 10`, levels 4 to 10, `M = 8`.
    pub fn new(method: Method) -> Self {
        Self {
            method,
            wavelet_angle: PI / 2.0,
            levels: 10,
            level_range: (4, 10),
            groups: 8,
            weights: WeightSource::MethodDefault,
        }
    }

    pub fn with_method(self, method: Method) -> Self {
        Self { method, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.level_range;
        if !(1 <= lo && lo < hi && hi <= self.levels) {
            return Err(Error::InvalidLevelRange {
                lo,
                hi,
                levels: self.levels,
            });
        }
        if self.groups == 0 {
            return Err(Error::ZeroGroups);
        }
        Ok(())
    }

    /// Trimean weights for this method, or `None` for baselines.
    pub fn resolved_weights(&self) -> Option<TrimeanWeights> {
        if self.method.is_baseline() {
            return None;
        }
        match self.weights {
            WeightSource::Custom(w) => Some(w),
            WeightSource::MethodDefault => self.method.default_weights(),
        }
    }
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self::new(Method::Ttme)
    }
}

/// The `N/2` mid-energies of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct MidEnergyLevel {
    pub level: usize,
    values: Vec<f64>,
}

impl MidEnergyLevel {
    pub fn new(level: usize, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidMidEnergy);
        }
        Ok(Self { level, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StatisticKind {
    TrimeanMidEnergy,
    TrimeanLogMidEnergy,
    MeanLog2MidEnergy,
    MedianLogSq,
    MedianLogMidEnergy,
    Log2MeanSq,
}

/// Per-level statistics: one value per group for trimean methods, a single
/// value for baselines.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupedStatistics {
    #[cfg_attr(feature = "serde", serde(rename = "j"))]
    pub level: usize,
    pub group_stats: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "kind"))]
    pub statistic_kind: StatisticKind,
    /// Zero energies replaced by the log floor on this level.
    pub floored: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HurstEstimate {
    pub method: Method,
    pub h_hat: f64,
    pub mean_slope: f64,
    #[cfg_attr(feature = "serde", serde(rename = "slopes"))]
    pub per_group_slopes: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(rename = "levels"))]
    pub per_level_group_stats: Vec<GroupedStatistics>,
    /// Trimean weights actually used.
    #[cfg_attr(feature = "serde", serde(skip_serializing_if = "Option::is_none"))]
    pub weights: Option<TrimeanWeights>,
    /// Total number of floored zero energies.
    pub floored: usize,
    #[cfg_attr(feature = "serde", serde(rename = "config_echo"))]
    pub config: EstimatorConfig,
}

impl HurstEstimate {
    /// `Ĥ_i` implied by each group's slope.
    pub fn per_group_h(&self) -> Vec<f64> {
        self.per_group_slopes
            .iter()
            .map(|&b| self.method.slope_to_h(b))
            .collect()
    }
}

/// `D_k = (d_k² + d_{k+N/2}²) / 2` for `k < N/2`.
pub fn mid_energies(detail: &[f64]) -> Result<Vec<f64>> {
    let n = detail.len();
    if n % 2 != 0 {
        return Err(Error::OddLength(n));
    }
    let (first, second) = detail.split_at(n / 2);
    Ok(first
        .iter()
        .zip(second)
        .map(|(a, b)| (a * a + b * b) / 2.0)
        .collect())
}

/// Group `i` (0-based) holds positions `i, i+M, i+2M, …`.
pub fn partition_strided(values: &[f64], groups: usize) -> Result<Vec<Vec<f64>>> {
    if groups == 0 {
        return Err(Error::ZeroGroups);
    }
    if values.len() % groups != 0 {
        return Err(Error::IndivisibleGroups {
            groups,
            len: values.len(),
        });
    }
    Ok((0..groups)
        .map(|i| values.iter().skip(i).step_by(groups).copied().collect())
        .collect())
}

/// Natural logs with zeros replaced by `max · LOG_FLOOR_FACTOR`.
/// Returns the logs and the number of floored entries.
fn floored_ln(values: &[f64], level: usize) -> Result<(Vec<f64>, usize)> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let floor = max * LOG_FLOOR_FACTOR;
    let mut floored = 0;
    let logs: Vec<f64> = values
        .iter()
        .map(|&v| {
            if v > 0.0 {
                ln(v)
            } else {
                floored += 1;
                ln(floor)
            }
        })
        .collect();
    if logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResponse { level });
    }
    Ok((logs, floored))
}

fn trimean_groups(
    level: &MidEnergyLevel,
    method: Method,
    weights: TrimeanWeights,
    groups: usize,
) -> Result<GroupedStatistics> {
    if level.values.is_empty() {
        return Err(Error::EmptySample);
    }
    let (source, floored) = match method.family() {
        MethodFamily::MidEnergy => (level.values.clone(), 0),
        MethodFamily::LogMidEnergy => floored_ln(&level.values, level.level)?,
        MethodFamily::Baseline => return Err(Error::NotATrimean(method)),
    };
    let group_stats = partition_strided(&source, groups)?
        .into_iter()
        .map(|mut g| general_trimean_in_place(&mut g, weights))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupedStatistics {
        level: level.level,
        group_stats,
        statistic_kind: method.statistic_kind(),
        floored,
    })
}

/// Per-group trimeans of one level's mid-energies (or their logs) for a
/// trimean method.
pub fn level_group_statistic(
    level_values: &MidEnergyLevel,
    config: &EstimatorConfig,
) -> Result<GroupedStatistics> {
    let weights = config
        .resolved_weights()
        .ok_or(Error::NotATrimean(config.method))?;
    trimean_groups(level_values, config.method, weights, config.groups)
}

/// Ordinary least squares fit, returning `(slope, intercept)`.
pub fn ols_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    weighted_slope(points.iter().map(|&(x, y)| (x, y, 1.0)))
}

fn weighted_slope(points: impl Iterator<Item = (f64, f64, f64)> + Clone) -> Result<(f64, f64)> {
    let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (x, y, w) in points.clone() {
        sw += w;
        sx += w * x;
        sy += w * y;
    }
    if sw.is_nan() || sw <= 0.0 {
        return Err(Error::DegenerateRegression);
    }
    let (mx, my) = (sx / sw, sy / sw);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y, w) in points {
        sxx += w * (x - mx) * (x - mx);
        sxy += w * (x - mx) * (y - my);
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

fn check_range(config: &EstimatorConfig, pyr: &CoefficientPyramid) -> Result<(usize, usize)> {
    config.validate()?;
    let (lo, hi) = config.level_range;
    if hi > pyr.levels() {
        return Err(Error::InvalidLevelRange {
            lo,
            hi,
            levels: pyr.levels(),
        });
    }
    Ok((lo, hi))
}

/// Runs any method on an existing coefficient pyramid.
pub fn estimate_from_pyramid(
    pyr: &CoefficientPyramid,
    config: &EstimatorConfig,
) -> Result<HurstEstimate> {
    if config.method.is_baseline() {
        baseline_from_pyramid(pyr, config)
    } else {
        trimean_from_pyramid(pyr, config)
    }
}

fn trimean_from_pyramid(
    pyr: &CoefficientPyramid,
    config: &EstimatorConfig,
) -> Result<HurstEstimate> {
    let (lo, hi) = check_range(config, pyr)?;
    let method = config.method;
    let weights = config
        .resolved_weights()
        .ok_or(Error::NotATrimean(method))?;

    let mut per_level = Vec::with_capacity(hi - lo + 1);
    // responses[level][group]
    let mut responses: Vec<Vec<f64>> = Vec::with_capacity(hi - lo + 1);
    for level in lo..=hi {
        let energies = MidEnergyLevel::new(level, mid_energies(pyr.level_detail(level)?)?)?;
        let stats = trimean_groups(&energies, method, weights, config.groups)?;
        let row: Vec<f64> = match method.family() {
            MethodFamily::MidEnergy => stats.group_stats.iter().map(|&m| log2(m)).collect(),
            _ => stats.group_stats.clone(),
        };
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteResponse { level });
        }
        responses.push(row);
        per_level.push(stats);
    }

    let per_group_slopes = (0..config.groups)
        .map(|i| {
            let points: Vec<(f64, f64)> = (lo..=hi)
                .zip(&responses)
                .map(|(level, row)| (level as f64, row[i]))
                .collect();
            ols_slope(&points).map(|(slope, _)| slope)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_slope = per_group_slopes.iter().sum::<f64>() / per_group_slopes.len() as f64;
    let floored = per_level.iter().map(|s| s.floored).sum();
    Ok(HurstEstimate {
        method,
        h_hat: method.slope_to_h(mean_slope),
        mean_slope,
        per_group_slopes,
        per_level_group_stats: per_level,
        weights: Some(weights),
        floored,
        config: *config,
    })
}

/// Veitch–Abry bias of `log₂` of a mean of `n` squared coefficients.
fn va_bias(n: f64) -> f64 {
    digamma(n / 2.0) / LN_2 - log2(n / 2.0)
}

/// Veitch–Abry variance of the corrected level response.
fn va_variance(n: f64) -> f64 {
    hurwitz_zeta2(n / 2.0) / (LN_2 * LN_2)
}

fn baseline_from_pyramid(
    pyr: &CoefficientPyramid,
    config: &EstimatorConfig,
) -> Result<HurstEstimate> {
    let (lo, hi) = check_range(config, pyr)?;
    let method = config.method;

    let mut per_level = Vec::with_capacity(hi - lo + 1);
    let mut points = Vec::with_capacity(hi - lo + 1);
    for level in lo..=hi {
        let detail = pyr.level_detail(level)?;
        let mut floored = 0;
        let (y, weight) = match method {
            Method::Va => {
                let n = detail.len() as f64;
                let mean_sq = detail.iter().map(|d| d * d).sum::<f64>() / n;
                (log2(mean_sq) - va_bias(n), 1.0 / va_variance(n))
            }
            Method::Ssb => {
                let (logs, f) = floored_ln(&mid_energies(detail)?, level)?;
                floored = f;
                (logs.iter().sum::<f64>() / logs.len() as f64 / LN_2, 1.0)
            }
            Method::Medl => {
                let squares: Vec<f64> = detail.iter().map(|d| d * d).collect();
                let (logs, f) = floored_ln(&squares, level)?;
                floored = f;
                (sample_quantile(&logs, 0.5)?, 1.0)
            }
            Method::Medla => {
                let (logs, f) = floored_ln(&mid_energies(detail)?, level)?;
                floored = f;
                (sample_quantile(&logs, 0.5)?, 1.0)
            }
            other => return Err(Error::NotABaseline(other)),
        };
        if !y.is_finite() {
            return Err(Error::NonFiniteResponse { level });
        }
        points.push((level as f64, y, weight));
        per_level.push(GroupedStatistics {
            level,
            group_stats: alloc::vec![y],
            statistic_kind: method.statistic_kind(),
            floored,
        });
    }

    let (slope, _) = weighted_slope(points.iter().copied())?;
    let floored = per_level.iter().map(|s| s.floored).sum();
    Ok(HurstEstimate {
        method,
        h_hat: method.slope_to_h(slope),
        mean_slope: slope,
        per_group_slopes: alloc::vec![slope],
        per_level_group_stats: per_level,
        weights: None,
        floored,
        config: *config,
    })
}

fn transform(signal: &Signal, config: &EstimatorConfig) -> Result<CoefficientPyramid> {
    config.validate()?;
    ndwt_forward(
        signal.values(),
        &pollen_filter(config.wavelet_angle),
        config.levels,
    )
}

/// Transforms `signal` and runs `config.method` (trimean or baseline).
pub fn estimate_hurst(signal: &Signal, config: &EstimatorConfig) -> Result<HurstEstimate> {
    estimate_from_pyramid(&transform(signal, config)?, config)
}

/// As [`estimate_hurst`], restricted to the four baseline methods.
pub fn estimate_baseline(signal: &Signal, config: &EstimatorConfig) -> Result<HurstEstimate> {
    if !config.method.is_baseline() {
        return Err(Error::NotABaseline(config.method));
    }
    estimate_hurst(signal, config)
}
