//! Non-monotone penalty.
//!
//! For every `u` with `f(u) = 1` and every 0-bit of `u`, let `v` be `u` with that
//! bit raised to 1. Each such pair with `f(v) = 0` is one violation. The scan runs
//! over all `n` directions at once per 64-bit word.

use serde::{Deserialize, Serialize};

use crate::truth_table::{tail_mask, TruthTable, VAR_MASKS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Ordered pairs `(u, v)`, `v` covering `u`, with `f(u) = 1` and `f(v) = 0`.
    pub violations: u64,
    /// `sum_{u : f(u) = 1} (n - w_H(u))`, the largest count the scan could produce.
    pub max_possible: u64,
}

impl MonotonicityReport {
    pub fn is_monotone(&self) -> bool {
        self.violations == 0
    }
}

pub fn monotonicity_report(tt: &TruthTable) -> MonotonicityReport {
    let n = tt.n();
    let words = tt.words();
    let mut violations = 0u64;
    let mut max_possible = 0u64;
    for (j, &mask) in VAR_MASKS.iter().enumerate().take(n) {
        let shift = 1u32 << j;
        // positions whose index has bit j clear
        let low = !mask & tail_mask(n);
        for &w in words {
            let ones = w & low;
            max_possible += ones.count_ones() as u64;
            violations += (ones & !(w >> shift)).count_ones() as u64;
        }
    }
    // higher variables pair whole words
    for j in VAR_MASKS.len()..n {
        let stride = 1usize << (j - 6);
        for (k, &w) in words.iter().enumerate() {
            if k & stride == 0 {
                max_possible += w.count_ones() as u64;
                violations += (w & !words[k + stride]).count_ones() as u64;
            }
        }
    }
    MonotonicityReport {
        violations,
        max_possible,
    }
}

pub fn is_monotone(tt: &TruthTable) -> bool {
    monotonicity_report(tt).violations == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct transcription of the three-step counting procedure.
    fn pointwise(tt: &TruthTable) -> MonotonicityReport {
        let n = tt.n();
        let mut violations = 0;
        let mut max_possible = 0;
        for u in 0..tt.len() {
            if !tt.get(u) {
                continue;
            }
            for j in 0..n {
                if u >> j & 1 == 0 {
                    max_possible += 1;
                    if !tt.get(u | 1 << j) {
                        violations += 1;
                    }
                }
            }
        }
        MonotonicityReport {
            violations,
            max_possible,
        }
    }

    #[test]
    fn negated_projection() {
        let f = TruthTable::from_bits(&[true, false, true, false]).unwrap();
        let r = monotonicity_report(&f);
        assert_eq!(r.violations, 2);
        assert_eq!(r.max_possible, 3);
    }

    #[test]
    fn constants() {
        for n in 1..=9 {
            let z = monotonicity_report(&TruthTable::zeros(n).unwrap());
            assert_eq!((z.violations, z.max_possible), (0, 0));
            let o = monotonicity_report(&TruthTable::ones(n).unwrap());
            assert_eq!(o.violations, 0);
            assert_eq!(o.max_possible, n as u64 * (1 << (n - 1)));
        }
    }

    #[test]
    fn word_scan_matches_pointwise() {
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        for n in 1..=10 {
            for _ in 0..50 {
                let tt = TruthTable::from_fn(n, |_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    state & 1 == 1
                })
                .unwrap();
                assert_eq!(monotonicity_report(&tt), pointwise(&tt), "n = {n}");
            }
        }
    }

    #[test]
    fn single_flip_changes_violations_by_at_most_n() {
        let n = 7;
        let mut tt = TruthTable::from_fn(n, |i| (i * 2654435761) % 7 < 3).unwrap();
        let mut before = monotonicity_report(&tt).violations as i64;
        for i in (0..tt.len()).step_by(5) {
            tt.flip(i);
            let after = monotonicity_report(&tt).violations as i64;
            assert!((after - before).abs() <= n as i64);
            before = after;
        }
    }
}
