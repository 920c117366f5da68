//! Fitness entropy and replicate statistics.

use crate::engine::Population;
use crate::{Error, Result};

/// Shannon entropy, in bits, of the distribution of distinct fitness values.
///
/// Classes are formed by exact equality of the cached fitness, so the result
/// depends only on the class sizes and lies in `[0, log2 M]`.
pub fn phenotypic_entropy(pop: &Population) -> f64 {
    entropy_of(&pop.fitnesses())
}

pub fn entropy_of(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut h = 0.0;
    for class in sorted.chunk_by(|a, b| a == b) {
        let p = class.len() as f64 / n;
        h -= p * p.log2();
    }
    // a single class yields -0.0
    h.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub n: usize,
    pub min: f64,
    pub quartile1: f64,
    pub median: f64,
    pub quartile3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Quantile by linear interpolation between closest ranks, `h = q (n - 1)`.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Five-number summary plus mean. The median of an even sample is the mean
/// of the two central values; quartiles use inclusive linear interpolation.
pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(Error::invalid("cannot summarize an empty sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SummaryStats {
        n: sorted.len(),
        min: sorted[0],
        quartile1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        quartile3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
    })
}
