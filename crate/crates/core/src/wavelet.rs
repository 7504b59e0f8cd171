//! Pollen 4-tap orthonormal filters and the periodic à trous
//! (non-decimated) wavelet transform.
//!
//! # Level numbering
//!
//! A `J`-level transform is computed at recursion depths `1..=J`, depth 1
//! being the finest scale. Levels are numbered the other way round,
//! `level = J + 1 − depth`, so level `J` is the finest detail and level 1
//! the coarsest. With this orientation the detail energy of a process with
//! Hurst exponent `H` decays like `2^{−(2H+1)·level}`.
//!
//! Filters are orthonormal (`Σh² = 1`) and are not rescaled between
//! levels; boundaries wrap around.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::math::{cos, sin};
use crate::{Error, Result};

/// One member of the Pollen family of 4-tap orthonormal wavelet filters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PollenFilter {
    pub angle: f64,
    /// Low-pass (scaling) taps.
    pub taps: [f64; 4],
    /// High-pass taps, `g[k] = (−1)^k h[3−k]`.
    pub high_taps: [f64; 4],
}

/// The Pollen filter for `angle` (radians).
///
/// `π/2` yields Haar (embedded in four taps) and `π/6` Daubechies-2.
pub fn pollen_filter(angle: f64) -> PollenFilter {
    let (s, c) = (sin(angle), cos(angle));
    let norm = 2.0 * SQRT_2;
    // Rounding residue at the special angles (π/2 is not representable)
    // is snapped to an exact zero so that Haar really has two taps.
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v / norm };
    let taps = [
        snap(1.0 + c - s),
        snap(1.0 + c + s),
        snap(1.0 - c + s),
        snap(1.0 - c - s),
    ];
    let high_taps = [taps[3], -taps[2], taps[1], -taps[0]];
    PollenFilter {
        angle,
        taps,
        high_taps,
    }
}

impl PollenFilter {
    pub fn haar() -> Self {
        pollen_filter(core::f64::consts::FRAC_PI_2)
    }

    pub fn daubechies2() -> Self {
        pollen_filter(core::f64::consts::FRAC_PI_6)
    }
}

/// Orientation tag carried by a [`CoefficientPyramid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LevelOrder {
    /// Level 1 is the coarsest detail (depth `J`), level `J` the finest
    /// (depth 1).
    CoarseToFine,
}

/// Full-length detail vectors of a `J`-level non-decimated transform.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    /// `details[j - 1]` holds level `j`.
    details: Vec<Vec<f64>>,
    smooth: Option<Vec<f64>>,
    filter: PollenFilter,
    n: usize,
}

impl CoefficientPyramid {
    /// Builds a pyramid from detail vectors indexed by level (coarse to
    /// fine). Every vector must have the same non-zero length.
    pub fn from_levels(
        details: Vec<Vec<f64>>,
        smooth: Option<Vec<f64>>,
        filter: PollenFilter,
    ) -> Result<Self> {
        if details.is_empty() {
            return Err(Error::ZeroLevels);
        }
        let n = details[0].len();
        if n == 0 {
            return Err(Error::EmptySignal);
        }
        for (i, d) in details.iter().enumerate() {
            if d.len() != n {
                return Err(Error::RaggedPyramid {
                    level: i + 1,
                    got: d.len(),
                    expected: n,
                });
            }
        }
        if let Some(s) = &smooth {
            if s.len() != n {
                return Err(Error::RaggedPyramid {
                    level: 0,
                    got: s.len(),
                    expected: n,
                });
            }
        }
        Ok(Self {
            details,
            smooth,
            filter,
            n,
        })
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn filter(&self) -> &PollenFilter {
        &self.filter
    }

    pub fn level_order(&self) -> LevelOrder {
        LevelOrder::CoarseToFine
    }

    /// Final scaling (smooth) vector, when the pyramid came from a transform.
    pub fn smooth(&self) -> Option<&[f64]> {
        self.smooth.as_deref()
    }

    /// Recursion depth that produced `level`.
    pub fn depth_of_level(&self, level: usize) -> usize {
        self.levels() + 1 - level
    }

    /// Detail coefficients of `level` (1-based, coarse to fine).
    pub fn level_detail(&self, level: usize) -> Result<&[f64]> {
        if level == 0 || level > self.levels() {
            return Err(Error::LevelOutOfRange {
                level,
                levels: self.levels(),
            });
        }
        Ok(&self.details[level - 1])
    }

    /// `(level, detail)` pairs, coarsest first.
    pub fn iter_levels(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.details
            .iter()
            .enumerate()
            .map(|(i, d)| (i + 1, d.as_slice()))
    }
}

/// Periodic convolution with a 4-tap filter dilated by `step`:
/// `out[k] = Σ_m taps[m] · input[(k − m·step) mod n]`.
fn dilated_circular(input: &[f64], taps: &[f64; 4], step: usize, out: &mut [f64]) {
    let n = input.len();
    let shifts: [usize; 4] = core::array::from_fn(|m| (m * step) % n);
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (tap, &shift) in taps.iter().zip(&shifts) {
            let idx = if k >= shift { k - shift } else { k + n - shift };
            acc += tap * input[idx];
        }
        *slot = acc;
    }
}

/// `levels`-level periodic non-decimated transform of `signal`.
///
/// Requires `signal.len() ≥ 2^levels`. Lengths that are not powers of two
/// are accepted; the wrap-around still applies.
pub fn ndwt_forward(
    signal: &[f64],
    filter: &PollenFilter,
    levels: usize,
) -> Result<CoefficientPyramid> {
    let n = signal.len();
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let fits = levels < usize::BITS as usize && (1usize << levels) <= n;
    if !fits {
        return Err(Error::TooManyLevels { levels, n });
    }

    let mut smooth = signal.to_vec();
    let mut next = vec![0.0; n];
    let mut by_depth = Vec::with_capacity(levels);
    for depth in 1..=levels {
        let step = 1usize << (depth - 1);
        let mut detail = vec![0.0; n];
        dilated_circular(&smooth, &filter.high_taps, step, &mut detail);
        dilated_circular(&smooth, &filter.taps, step, &mut next);
        core::mem::swap(&mut smooth, &mut next);
        by_depth.push(detail);
    }
    by_depth.reverse();
    CoefficientPyramid::from_levels(by_depth, Some(smooth), *filter)
}
