//! Independent reference for the signed-rank test: mid-ranks by counting
//! and the null distribution by walking every sign pattern.
#![allow(dead_code)]

/// `(W, P(W >= w))` for the one-sided-greater alternative, from all `2^n`
/// sign assignments of the non-zero differences `variant - base`.
pub fn brute_force_wilcoxon(pairs: &[(f64, f64)]) -> (f64, f64) {
    let diffs: Vec<f64> = pairs.iter().map(|(b, v)| v - b).filter(|d| *d != 0.0).collect();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let n = diffs.len();
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s >= w - 1e-9 {
            hits += 1;
        }
    }
    (w, hits as f64 / (1u64 << n) as f64)
}

/// Pairs with the given differences on a zero base.
pub fn from_diffs(diffs: &[f64]) -> Vec<(f64, f64)> {
    diffs.iter().map(|&d| (0.0, d)).collect()
}

/// Five small cases covering all-positive, one negative, tied magnitudes,
/// dropped zeros and a mixed sample.
pub fn enumerated_cases() -> Vec<Vec<(f64, f64)>> {
    vec![
        from_diffs(&[1.0, 2.0, 3.0, 4.0, 5.0]),
        from_diffs(&[1.0, -2.0, 3.0, 4.0, 5.0]),
        from_diffs(&[1.0, 1.0, -2.0, 3.0, 3.0, 3.0]),
        vec![(4.0, 4.0), (10.0, 13.5), (7.0, 5.0), (1.0, 9.0), (2.0, 2.0), (3.0, 4.0), (6.0, 12.0)],
        from_diffs(&[-0.5, 2.5, -1.0, 4.0, 3.0, -2.5, 6.0, 7.5]),
    ]
}
