//! Paired statistics: one-sided Wilcoxon signed-rank test and Cohen's d.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

/// Minimum number of non-zero differences for the signed-rank test.
pub const MIN_NONZERO: usize = 5;
/// Largest sample size handled by exact enumeration.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("too few pairs: {got} usable, {needed} needed")]
    TooFewPairs { got: usize, needed: usize },
    #[error("differences have zero variance")]
    ZeroVariance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of positive differences.
    pub w: f64,
    /// One-sided p-value for "variant greater than base", `P(W >= w)`.
    pub p: f64,
    /// Number of non-zero differences.
    pub n: usize,
    pub exact: bool,
}

/// Ranks of `|x|` with ties given their mid-rank.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]].abs() == values[idx[i]].abs() {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            ranks[t] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// One-sided paired Wilcoxon signed-rank test on `(base, variant)` pairs
/// with differences `variant - base`. Zero differences are dropped. The
/// p-value is exact (all sign patterns, mid-ranks included) for up to 20
/// differences, and otherwise from the tie-corrected normal approximation
/// with continuity correction.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    let diffs: Vec<f64> = pairs.iter().map(|&(b, v)| v - b).filter(|&d| d != 0.0).collect();
    let n = diffs.len();
    if n < MIN_NONZERO {
        return Err(StatsError::TooFewPairs {
            got: n,
            needed: MIN_NONZERO,
        });
    }
    let ranks = mid_ranks(&diffs);
    let w: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    if n <= EXACT_LIMIT {
        return Ok(WilcoxonResult {
            w,
            p: exact_upper_tail(&ranks, w),
            n,
            exact: true,
        });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted: Vec<f64> = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    for group in sorted.chunk_by(|a, b| a == b) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let p = if var <= 0.0 {
        if w >= mean {
            1.0
        } else {
            0.0
        }
    } else {
        let z = (w - mean - 0.5) / var.sqrt();
        Normal::new(0.0, 1.0).expect("standard normal").sf(z)
    };
    Ok(WilcoxonResult { w, p, n, exact: false })
}

/// `P(W >= w)` under the null by dynamic programming over doubled ranks,
/// which are integers even with mid-ranks.
fn exact_upper_tail(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let target = (2.0 * w).round() as usize;
    let hits: u64 = counts[target.min(total + 1)..].iter().sum();
    hits as f64 / (1u64 << ranks.len()) as f64
}

/// Paired Cohen's d: mean difference over the sample standard deviation of
/// the differences `variant - base`.
pub fn cohens_d_paired(pairs: &[(f64, f64)]) -> Result<f64, StatsError> {
    if pairs.len() < 2 {
        return Err(StatsError::TooFewPairs {
            got: pairs.len(),
            needed: 2,
        });
    }
    let diffs: Vec<f64> = pairs.iter().map(|&(b, v)| v - b).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd <= 1e-12 * mean.abs().max(1.0) {
        return Err(StatsError::ZeroVariance);
    }
    Ok(mean / sd)
}
