use rand::Rng;

use crate::error::{Error, Result};

/// Power law `P(k) ∝ k^(−exponent)` on the integers of `[lower, upper]`.
///
/// The lower cutoff may be fractional: the integer `⌊lower⌋` keeps the
/// fraction `1 − (lower − ⌊lower⌋)` of its weight, so the mean is a
/// continuous, increasing function of the cutoff and can be calibrated by
/// bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePowerLaw {
    first: usize,
    cdf: Vec<f64>,
    mean: f64,
}

impl DiscretePowerLaw {
    pub fn new(lower: f64, upper: usize, exponent: f64) -> Result<Self> {
        if !(lower >= 1.0 && lower <= upper as f64) || !exponent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power law on [{lower}, {upper}] with exponent {exponent}"
            )));
        }
        let first = lower.floor() as usize;
        let cut = lower - first as f64;
        let weights: Vec<f64> = (first..=upper)
            .map(|k| {
                let w = (k as f64).powf(-exponent);
                if k == first {
                    w * (1.0 - cut)
                } else {
                    w
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mean = weights
            .iter()
            .enumerate()
            .map(|(i, w)| (first + i) as f64 * w)
            .sum::<f64>()
            / total;
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Self { first, cdf, mean })
    }

    /// Lower cutoff in `[1, upper]` whose distribution has mean `target`.
    pub fn calibrated(target: f64, upper: usize, exponent: f64) -> Result<Self> {
        let lo_dist = Self::new(1.0, upper, exponent)?;
        if target < lo_dist.mean || target > upper as f64 {
            return Err(Error::InvalidParameter(format!(
                "mean degree {target} unreachable: power law with exponent {exponent} on [1, {upper}] spans [{:.3}, {upper}]",
                lo_dist.mean
            )));
        }
        let (mut lo, mut hi) = (1.0, upper as f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if Self::new(mid, upper, exponent)?.mean < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Self::new(0.5 * (lo + hi), upper, exponent)
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn min_value(&self) -> usize {
        self.first + self.cdf.iter().position(|&c| c > 0.0).unwrap_or(0)
    }

    pub fn max_value(&self) -> usize {
        self.first + self.cdf.len() - 1
    }

    /// Inverse-CDF draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let idx = self.cdf.partition_point(|&c| c <= u);
        self.first + idx.min(self.cdf.len() - 1)
    }
}
