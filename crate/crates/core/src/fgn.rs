//! Fractional Gaussian noise autocovariance.

use crate::math::powf;

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`:
/// `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
///
/// Returns `None` when `hurst` is outside `(0, 1)`.
pub fn fgn_covariance(hurst: f64, k: usize) -> Option<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return None;
    }
    let two_h = 2.0 * hurst;
    let k = k as f64;
    let lag = |x: f64| powf(libm::fabs(x), two_h);
    Some(0.5 * (lag(k + 1.0) - 2.0 * lag(k) + lag(k - 1.0)))
}
