//! Order-statistic machinery: floor-rule sample quantiles, the general
//! trimean estimator and its asymptotic behaviour on exponential and
//! log-exponential samples.
//!
//! The sample `p`-quantile is the order statistic `X_{⌊np⌋:n}` (1-indexed),
//! with no interpolation. The general trimean with weights `(α, p)` is
//!
//! ```text
//! μ̂ = (α/2)·Y_p + (1 − α)·Y_½ + (α/2)·Y_{1−p}
//! ```
//!
//! For `n` i.i.d. Exp(λ) values `μ̂` is asymptotically normal with mean
//! `c(α,p)·λ` and variance `f(α,p)·λ²/n`; for the logarithms of such values
//! the mean is `c(α,p) + ln λ` and the variance `f(α,p)/n`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{LN_2, SQRT_2};

use crate::math::{floor, ln, sqrt};
use crate::{Error, Result};

/// Distance kept between `p` and the ends of `(0, 1/2)` inside the
/// asymptotic formulas, which divide by `p`, `ln p` and `ln(1 − p)`.
pub const BOUNDARY_GUARD: f64 = 1e-6;

/// Weights `(α, p)` of a general trimean estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrimeanWeights {
    alpha: f64,
    p: f64,
}

impl TrimeanWeights {
    /// Tukey's trimean, `(1/2, 1/4)`.
    pub const TUKEY: Self = Self {
        alpha: 0.5,
        p: 0.25,
    };
    /// Gastwirth's estimator, `(0.6, 1/3)`.
    pub const GASTWIRTH: Self = Self {
        alpha: 0.6,
        p: 1.0 / 3.0,
    };

    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        let alpha_ok = (0.0..=1.0).contains(&alpha);
        let p_ok = p > 0.0 && p < 0.5;
        if alpha_ok && p_ok {
            Ok(Self { alpha, p })
        } else {
            Err(Error::InvalidWeights { alpha, p })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Coefficients applied to `(Y_p, Y_½, Y_{1−p})`.
    pub fn coefficients(&self) -> [f64; 3] {
        let side = self.alpha / 2.0;
        [side, 1.0 - self.alpha, side]
    }

    /// Quantile orders `(p, 1/2, 1 − p)`.
    pub fn orders(&self) -> [f64; 3] {
        [self.p, 0.5, 1.0 - self.p]
    }

    fn guarded_p(&self) -> f64 {
        self.p.clamp(BOUNDARY_GUARD, 0.5 - BOUNDARY_GUARD)
    }
}

/// A strictly increasing list of quantile orders in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileSpec {
    orders: Vec<f64>,
}

impl QuantileSpec {
    pub fn new(orders: impl Into<Vec<f64>>) -> Result<Self> {
        let orders = orders.into();
        let inside = orders.iter().all(|&p| p > 0.0 && p < 1.0);
        let increasing = orders.windows(2).all(|w| w[0] < w[1]);
        if orders.is_empty() || !inside || !increasing {
            return Err(Error::InvalidQuantileOrders);
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

/// Which family of samples an [`AsymptoticSummary`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum AsymptoticContext {
    /// Exponential samples (mid-energies).
    MidEnergy,
    /// Logarithms of exponential samples.
    LogMidEnergy,
}

/// Location factor `c(α,p)` and variance factor `f(α,p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticSummary {
    pub c: f64,
    pub f: f64,
    pub context: AsymptoticContext,
}

/// Symmetric dense matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl CovMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `a · Σ · aᵀ`.
    pub fn quadratic_form(&self, a: &[f64]) -> f64 {
        assert_eq!(a.len(), self.dim, "coefficient vector has wrong length");
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += a[i] * self.get(i, j) * a[j];
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// 1-indexed rank `⌊n·p⌋`.
///
/// The product gets a few ulps of slack so that orders such as `1/3`, which
/// are not representable, still land on the intended integer (`6 · 1/3 = 2`).
fn floor_rank(n: usize, p: f64) -> usize {
    let np = n as f64 * p;
    floor(np + np * 1e-12) as usize
}

fn check_order(n: usize, p: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    match floor_rank(n, p) {
        0 => Err(Error::SampleTooSmall { n, p }),
        k => Ok(k.min(n)),
    }
}

fn total_cmp(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}

/// The floor-rule sample quantile `X_{⌊np⌋:n}`.
pub fn sample_quantile(xs: &[f64], p: f64) -> Result<f64> {
    let rank = check_order(xs.len(), p)?;
    let mut scratch = xs.to_vec();
    let (_, kth, _) = scratch.select_nth_unstable_by(rank - 1, total_cmp);
    Ok(*kth)
}

/// General trimean of `xs` with weights `w`.
pub fn general_trimean(xs: &[f64], w: TrimeanWeights) -> Result<f64> {
    let mut scratch = xs.to_vec();
    general_trimean_in_place(&mut scratch, w)
}

/// As [`general_trimean`], reordering `xs` instead of copying it.
pub fn general_trimean_in_place(xs: &mut [f64], w: TrimeanWeights) -> Result<f64> {
    let n = xs.len();
    let [lo_p, mid_p, hi_p] = w.orders();
    let mid = check_order(n, mid_p)? - 1;
    // Outer quantiles carry no weight when α = 0, so they impose no size limit.
    if w.alpha == 0.0 {
        return Ok(*xs.select_nth_unstable_by(mid, total_cmp).1);
    }
    let lo = check_order(n, lo_p)? - 1;
    let hi = check_order(n, hi_p)? - 1;

    // Select the median first, then search each side for the outer ranks.
    let (left, median, right) = xs.select_nth_unstable_by(mid, total_cmp);
    let median = *median;
    let lower = if lo == mid {
        median
    } else {
        *left.select_nth_unstable_by(lo, total_cmp).1
    };
    let upper = if hi == mid {
        median
    } else {
        *right.select_nth_unstable_by(hi - mid - 1, total_cmp).1
    };

    let [a_lo, a_mid, a_hi] = w.coefficients();
    Ok(a_lo * lower + a_mid * median + a_hi * upper)
}

/// Asymptotic covariance of the sample quantiles at `spec`'s orders:
/// `σ_ij = p_i (1 − p_j) / (f_i f_j)` for `i ≤ j`, symmetrized.
pub fn quantile_asymptotic_cov(spec: &QuantileSpec, densities: &[f64]) -> Result<CovMatrix> {
    let r = spec.len();
    if densities.len() != r {
        return Err(Error::LengthMismatch {
            expected: r,
            got: densities.len(),
        });
    }
    if let Some(&bad) = densities.iter().find(|&&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::NonPositiveDensity(bad));
    }
    let p = spec.orders();
    let mut data = alloc::vec![0.0; r * r];
    for i in 0..r {
        for j in i..r {
            let s = p[i] * (1.0 - p[j]) / (densities[i] * densities[j]);
            data[i * r + j] = s;
            data[j * r + i] = s;
        }
    }
    Ok(CovMatrix { dim: r, data })
}

/// `c(α,p)` and `f(α,p)` for the trimean of i.i.d. exponential values.
pub fn gtme_asymptotics(w: TrimeanWeights) -> AsymptoticSummary {
    let alpha = w.alpha;
    let p = w.guarded_p();
    let c = alpha / 2.0 * ln(1.0 / (p * (1.0 - p))) + (1.0 - alpha) * LN_2;
    let f = alpha * (1.0 - 2.0 * p) * (alpha - 4.0 * p) / (4.0 * p * (1.0 - p)) + 1.0;
    AsymptoticSummary {
        c,
        f,
        context: AsymptoticContext::MidEnergy,
    }
}

/// Outer-quantile part of the log-exponential variance factor:
/// `σ₁₁ + σ₃₃ + 2σ₁₃` at unit scale.
pub fn log_g1(p: f64) -> f64 {
    let q = 1.0 - p;
    let lq = ln(q);
    let lp = ln(p);
    p / (q * lq * lq) + q / (p * lp * lp) + 2.0 * p / (q * lq * lp)
}

/// Cross term between the median and the outer quantiles: `2(σ₁₂ + σ₂₃)`.
pub fn log_g2(p: f64) -> f64 {
    let q = 1.0 - p;
    let l_half = ln(0.5);
    2.0 * p / (q * ln(q) * l_half) + 2.0 / (l_half * ln(p))
}

/// `c(α,p)` and `f(α,p)` for the trimean of logs of i.i.d. exponential values.
pub fn gtlme_asymptotics(w: TrimeanWeights) -> AsymptoticSummary {
    let alpha = w.alpha;
    let p = w.guarded_p();
    let c = alpha / 2.0 * ln(ln(1.0 / (1.0 - p)) * ln(1.0 / p)) + (1.0 - alpha) * ln(LN_2);
    AsymptoticSummary {
        c,
        f: log_variance_factor(alpha, p),
        context: AsymptoticContext::LogMidEnergy,
    }
}

fn log_variance_factor(alpha: f64, p: f64) -> f64 {
    let beta = 1.0 - alpha;
    alpha * alpha / 4.0 * log_g1(p) + alpha * beta / 2.0 * log_g2(p) + beta * beta / (LN_2 * LN_2)
}

/// The `α` that zeroes `∂f/∂α` of the log variance factor at fixed `p`,
/// clamped to `[0, 1]`.
pub fn gtlme_stationary_alpha(p: f64) -> f64 {
    let k = 2.0 / (LN_2 * LN_2);
    let alpha = (k - log_g2(p) / 2.0) / (log_g1(p) / 2.0 - log_g2(p) + k);
    alpha.clamp(0.0, 1.0)
}

/// `(α, p) = (2 − √2, 1 − √2/2)`, the minimizer of the exponential
/// variance factor.
pub fn optimal_gtme_weights() -> TrimeanWeights {
    TrimeanWeights {
        alpha: 2.0 - SQRT_2,
        p: 1.0 - SQRT_2 / 2.0,
    }
}

/// Search range for the GTLME optimum.
pub const GTLME_SEARCH: (f64, f64) = (0.01, 0.49);

/// Minimizer of the log variance factor along the curve `α(p)`, found by
/// golden-section search over `p` until the bracket is narrower than
/// `tolerance`.
pub fn optimal_gtlme_weights(tolerance: f64) -> Result<TrimeanWeights> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidTolerance(tolerance));
    }
    let profile = |p: f64| log_variance_factor(gtlme_stationary_alpha(p), p);
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;

    let (mut a, mut b) = GTLME_SEARCH;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = profile(x1);
    let mut f2 = profile(x2);
    while b - a > tolerance {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = profile(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = profile(x2);
        }
    }
    let p = (a + b) / 2.0;
    Ok(TrimeanWeights {
        alpha: gtlme_stationary_alpha(p),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn quantile_floor_rule() {
        let xs = [10.0, 20.0, 30.0, 40.0];
        assert_eq!(sample_quantile(&xs, 0.5).unwrap(), 20.0);
        assert_eq!(sample_quantile(&xs, 0.25).unwrap(), 10.0);
        let seven: Vec<f64> = (1..=7).map(f64::from).collect();
        assert_eq!(sample_quantile(&seven, 0.75).unwrap(), 5.0);
    }

    #[test]
    fn quantile_ignores_input_order() {
        let xs = [40.0, 10.0, 30.0, 20.0];
        assert_eq!(sample_quantile(&xs, 0.5).unwrap(), 20.0);
    }

    #[test]
    fn quantile_errors() {
        assert_eq!(sample_quantile(&[], 0.5), Err(Error::EmptySample));
        assert_eq!(
            sample_quantile(&[1.0, 2.0, 3.0], 0.25),
            Err(Error::SampleTooSmall { n: 3, p: 0.25 })
        );
        assert_eq!(
            sample_quantile(&[1.0], 0.0),
            Err(Error::InvalidProbability(0.0))
        );
    }

    #[test]
    fn trimean_examples() {
        let five = [1.0, 2.0, 3.0, 4.0, 5.0];
        // ⌊5·0.1⌋ = 0, but with α = 0 only the median (rank ⌊2.5⌋ = 2) is used.
        let median_only = TrimeanWeights::new(0.0, 0.1).unwrap();
        assert_eq!(general_trimean(&five, median_only).unwrap(), 2.0);
        let tukey_small = general_trimean(&[1.0, 2.0, 3.0], TrimeanWeights::TUKEY);
        assert_eq!(tukey_small, Err(Error::SampleTooSmall { n: 3, p: 0.25 }));

        let seven: Vec<f64> = (1..=7).map(f64::from).collect();
        assert_eq!(general_trimean(&seven, TrimeanWeights::TUKEY).unwrap(), 3.0);

        let six = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let g = general_trimean(&six, TrimeanWeights::GASTWIRTH).unwrap();
        assert!((g - 3.0).abs() < 1e-15, "{g}");
    }

    #[test]
    fn trimean_with_ties() {
        let xs = [2.0, 2.0, 2.0, 1.0, 3.0, 2.0, 2.0, 2.0];
        assert_eq!(general_trimean(&xs, TrimeanWeights::TUKEY).unwrap(), 2.0);
    }

    #[test]
    fn weights_validation() {
        assert!(TrimeanWeights::new(0.5, 0.0).is_err());
        assert!(TrimeanWeights::new(0.5, 0.5).is_err());
        assert!(TrimeanWeights::new(1.1, 0.25).is_err());
        assert!(TrimeanWeights::new(-0.1, 0.25).is_err());
        assert!(TrimeanWeights::new(1.0, 0.25).is_ok());
        assert!(TrimeanWeights::new(f64::NAN, 0.25).is_err());
    }

    #[test]
    fn uniform_covariance() {
        let spec = QuantileSpec::new(vec![0.25, 0.5, 0.75]).unwrap();
        let cov = quantile_asymptotic_cov(&spec, &[1.0, 1.0, 1.0]).unwrap();
        let expected = [
            [0.1875, 0.125, 0.0625],
            [0.125, 0.25, 0.125],
            [0.0625, 0.125, 0.1875],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((cov.get(i, j) - e).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exponential_covariance_matches_closed_form() {
        let lambda = 2.5;
        let spec = QuantileSpec::new(vec![0.25, 0.5, 0.75]).unwrap();
        let dens = [
            3.0 / (4.0 * lambda),
            1.0 / (2.0 * lambda),
            1.0 / (4.0 * lambda),
        ];
        let cov = quantile_asymptotic_cov(&spec, &dens).unwrap();
        let l2 = lambda * lambda;
        let expected = [
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [1.0 / 3.0, 1.0, 1.0],
            [1.0 / 3.0, 1.0, 3.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!(close(cov.get(i, j), e * l2, 1e-14));
            }
        }
    }

    #[test]
    fn single_order_covariance() {
        let spec = QuantileSpec::new(vec![0.5]).unwrap();
        let cov = quantile_asymptotic_cov(&spec, &[0.4]).unwrap();
        assert!(close(cov.get(0, 0), 0.25 / 0.16, 1e-15));
    }

    #[test]
    fn covariance_errors() {
        let spec = QuantileSpec::new(vec![0.25, 0.5]).unwrap();
        assert!(matches!(
            quantile_asymptotic_cov(&spec, &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            quantile_asymptotic_cov(&spec, &[1.0, 0.0]),
            Err(Error::NonPositiveDensity(_))
        ));
        assert!(QuantileSpec::new(vec![0.5, 0.25]).is_err());
        assert!(QuantileSpec::new(vec![0.0, 0.25]).is_err());
        assert!(QuantileSpec::new(vec![0.5, 1.0]).is_err());
    }

    #[test]
    fn gtme_closed_forms() {
        let tukey = gtme_asymptotics(TrimeanWeights::TUKEY);
        assert!(close(tukey.f, 5.0 / 6.0, 1e-12));
        assert!(close(tukey.c, 0.25 * ln(64.0 / 3.0), 1e-12));
        assert!((tukey.c - 0.76507).abs() < 1e-5);

        let gastwirth = gtme_asymptotics(TrimeanWeights::GASTWIRTH);
        assert!(close(gastwirth.f, 0.835, 1e-12));
        assert!(close(gastwirth.c, 0.3 * ln(4.5) + 0.4 * LN_2, 1e-12));

        let best = gtme_asymptotics(optimal_gtme_weights());
        assert!(close(best.f, 2.0 * (SQRT_2 - 1.0), 1e-12));
        assert!(best.f < 5.0 / 6.0);
    }

    #[test]
    fn gtme_optimum_is_exact() {
        let w = optimal_gtme_weights();
        assert_eq!(w.alpha(), 2.0 - SQRT_2);
        assert_eq!(w.p(), 1.0 - SQRT_2 / 2.0);
        assert!((w.alpha() - 2.0 * w.p()).abs() < 1e-15);
        assert!((w.alpha() - 0.585786).abs() < 1e-6);
        assert!((w.p() - 0.292893).abs() < 1e-6);
    }

    #[test]
    fn gtme_optimum_beats_grid() {
        let best = gtme_asymptotics(optimal_gtme_weights()).f;
        for i in 0..199 {
            for k in 1..=99 {
                let alpha = i as f64 / 198.0;
                let p = k as f64 / 200.0;
                let w = TrimeanWeights::new(alpha, p).unwrap();
                assert!(gtme_asymptotics(w).f >= best - 1e-15, "alpha={alpha} p={p}");
            }
        }
    }

    #[test]
    fn gtme_hessian_positive_definite_at_optimum() {
        // Second differences of the closed form around the optimum.
        let w = optimal_gtme_weights();
        let f = |a: f64, p: f64| gtme_asymptotics(TrimeanWeights { alpha: a, p }).f;
        let (a, p, h) = (w.alpha(), w.p(), 1e-4);
        let faa = (f(a + h, p) - 2.0 * f(a, p) + f(a - h, p)) / (h * h);
        let fpp = (f(a, p + h) - 2.0 * f(a, p) + f(a, p - h)) / (h * h);
        let fap =
            (f(a + h, p + h) - f(a + h, p - h) - f(a - h, p + h) + f(a - h, p - h)) / (4.0 * h * h);
        assert!(faa > 0.0);
        assert!(faa * fpp - fap * fap > 0.0);
    }

    fn log_exp_densities(orders: &[f64]) -> Vec<f64> {
        orders.iter().map(|&p| -(1.0 - p) * ln(1.0 - p)).collect()
    }

    fn exp_densities(orders: &[f64]) -> Vec<f64> {
        orders.iter().map(|&p| 1.0 - p).collect()
    }

    #[test]
    fn gtlme_matches_contraction_for_presets() {
        for w in [TrimeanWeights::TUKEY, TrimeanWeights::GASTWIRTH] {
            let spec = QuantileSpec::new(w.orders().to_vec()).unwrap();
            let cov = quantile_asymptotic_cov(&spec, &log_exp_densities(spec.orders())).unwrap();
            let contraction = cov.quadratic_form(&w.coefficients());
            let f = gtlme_asymptotics(w).f;
            assert!(close(f, contraction, 1e-12), "{f} vs {contraction}");
        }
    }

    #[test]
    fn gtlme_tukey_matches_explicit_bracket() {
        let (l34, l12, l14) = (ln(0.75), ln(0.5), ln(0.25));
        let bracket = 1.0 / (12.0 * l34 * l34)
            + 1.0 / (3.0 * l34 * l12)
            + 1.0 / (6.0 * l34 * l14)
            + 1.0 / (l12 * l12)
            + 1.0 / (l12 * l14)
            + 3.0 / (4.0 * l14 * l14);
        let f = gtlme_asymptotics(TrimeanWeights::TUKEY).f;
        assert!(close(f, bracket / 4.0, 1e-12));
    }

    #[test]
    fn gtlme_gastwirth_matches_explicit_bracket() {
        let (l23, l12, l13) = (ln(2.0 / 3.0), ln(0.5), ln(1.0 / 3.0));
        let bracket = 0.09 / (2.0 * l23 * l23)
            + 0.12 / (l23 * l12)
            + 0.09 / (l13 * l23)
            + 0.16 / (l12 * l12)
            + 0.24 / (l12 * l13)
            + 0.18 / (l13 * l13);
        let f = gtlme_asymptotics(TrimeanWeights::GASTWIRTH).f;
        assert!(close(f, bracket, 1e-12));
    }

    #[test]
    fn gtlme_edges() {
        let p = 0.3;
        let outer = gtlme_asymptotics(TrimeanWeights::new(1.0, p).unwrap());
        assert!(close(outer.f, log_g1(p) / 4.0, 1e-14));
        let spec = QuantileSpec::new(vec![p, 1.0 - p]).unwrap();
        let cov = quantile_asymptotic_cov(&spec, &log_exp_densities(spec.orders())).unwrap();
        assert!(close(outer.f, cov.quadratic_form(&[0.5, 0.5]), 1e-12));

        let median = gtlme_asymptotics(TrimeanWeights::new(0.0, p).unwrap());
        assert!(close(median.f, 1.0 / (LN_2 * LN_2), 1e-14));
        assert!((median.f - 2.0814).abs() < 1e-4);
        assert!(close(median.c, ln(LN_2), 1e-14));
    }

    #[test]
    fn gtlme_optimum_near_published_values() {
        let w = optimal_gtlme_weights(1e-4).unwrap();
        assert!((w.alpha() - 0.5965).abs() < 0.005, "alpha {}", w.alpha());
        assert!((w.p() - 0.24).abs() < 0.005, "p {}", w.p());

        let best = gtlme_asymptotics(w).f;
        assert!(best <= gtlme_asymptotics(TrimeanWeights::TUKEY).f);
        assert!(best <= gtlme_asymptotics(TrimeanWeights::GASTWIRTH).f);

        let grid_min = (0..4801)
            .map(|i| {
                let p = 0.01 + 0.48 * i as f64 / 4800.0;
                log_variance_factor(gtlme_stationary_alpha(p), p)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(best <= grid_min + 1e-6, "{best} vs grid {grid_min}");
    }

    #[test]
    fn gtlme_tolerance_validation() {
        assert_eq!(
            optimal_gtlme_weights(0.0),
            Err(Error::InvalidTolerance(0.0))
        );
        assert!(optimal_gtlme_weights(-1.0).is_err());
        assert!(optimal_gtlme_weights(f64::NAN).is_err());
    }

    #[test]
    fn weights_partition_unity() {
        for w in [
            TrimeanWeights::TUKEY,
            TrimeanWeights::GASTWIRTH,
            optimal_gtme_weights(),
        ] {
            let s: f64 = w.coefficients().iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }

    fn ldl_pivots(m: &CovMatrix) -> Vec<f64> {
        let r = m.dim();
        let mut a: Vec<f64> = m.as_slice().to_vec();
        let mut pivots = Vec::with_capacity(r);
        for k in 0..r {
            let d = a[k * r + k];
            pivots.push(d);
            if d.abs() < 1e-300 {
                continue;
            }
            for i in k + 1..r {
                let l = a[i * r + k] / d;
                for j in k + 1..r {
                    a[i * r + j] -= l * a[k * r + j];
                }
            }
        }
        pivots
    }

    fn weights_strategy() -> impl Strategy<Value = TrimeanWeights> {
        (0.0..=1.0f64, 0.001..0.499f64).prop_map(|(a, p)| TrimeanWeights::new(a, p).unwrap())
    }

    proptest! {
        #[test]
        fn affine_equivariance(
            xs in proptest::collection::vec(-1e3..1e3f64, 8..64),
            scale in 0.5..4.0f64,
            shift in -10.0..10.0f64,
            w in weights_strategy(),
        ) {
            prop_assume!(floor_rank(xs.len(), w.p()) >= 1);
            let base = general_trimean(&xs, w).unwrap();
            let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
            let got = general_trimean(&moved, w).unwrap();
            prop_assert!((got - (scale * base + shift)).abs() <= 1e-9 * (1.0 + got.abs()));
        }

        #[test]
        fn alpha_zero_is_median(
            xs in proptest::collection::vec(-1e3..1e3f64, 4..64),
            p in 0.26..0.499f64,
        ) {
            let w = TrimeanWeights::new(0.0, p).unwrap();
            prop_assert_eq!(general_trimean(&xs, w).unwrap(), sample_quantile(&xs, 0.5).unwrap());
        }

        #[test]
        fn weights_sum_to_one(w in weights_strategy()) {
            let s: f64 = w.coefficients().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-15);
        }

        #[test]
        fn gtme_matches_contraction(w in weights_strategy()) {
            let spec = QuantileSpec::new(w.orders().to_vec()).unwrap();
            let cov = quantile_asymptotic_cov(&spec, &exp_densities(spec.orders())).unwrap();
            let contraction = cov.quadratic_form(&w.coefficients());
            let f = gtme_asymptotics(w).f;
            prop_assert!(f > 0.0);
            prop_assert!((f - contraction).abs() <= 1e-12 * contraction.abs());
        }

        #[test]
        fn covariance_is_psd(
            mut orders in proptest::collection::vec(0.01..0.99f64, 2..4),
            dens in proptest::collection::vec(0.1..3.0f64, 3),
        ) {
            orders.sort_by(f64::total_cmp);
            orders.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let spec = match QuantileSpec::new(orders) { Ok(s) => s, Err(_) => return Ok(()) };
            let cov = quantile_asymptotic_cov(&spec, &dens[..spec.len()]).unwrap();
            // LDLᵀ pivots have the same signs as the eigenvalues (Sylvester).
            let bound = -1e-12 * cov.trace();
            for pivot in ldl_pivots(&cov) {
                prop_assert!(pivot >= bound, "pivot {}", pivot);
            }
        }
    }
}
