//! Digamma and the order-2 Hurwitz zeta function, used by the
//! Veitch–Abry bias correction and variance weights.

use crate::math::ln;

/// ψ(x) for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x < 25.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Asymptotic series with Bernoulli numbers B2..B12.
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    acc + ln(x) - 0.5 * inv - series
}

/// ζ(2, a) = Σ_{k≥0} 1/(a+k)² for `a > 0` (the trigamma function).
pub fn hurwitz_zeta2(a: f64) -> f64 {
    let mut a = a;
    let mut acc = 0.0;
    while a < 25.0 {
        acc += 1.0 / (a * a);
        a += 1.0;
    }
    // Euler–Maclaurin tail: 1/a + 1/(2a²) + Σ B_{2j}/a^{2j+1}.
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    let tail = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 * (1.0 / 30.0))));
    acc + tail
}
