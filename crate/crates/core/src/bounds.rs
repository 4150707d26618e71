//! Exact references for monotone functions: threshold and majority functions,
//! their closed-form nonlinearity, and upper bounds on the nonlinearity of any
//! monotone function.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::truth_table::{check_vars, TruthTable};

/// `C(n, k)` in exact integer arithmetic; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // each partial product is itself a binomial coefficient, so division is exact
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `sum_{i=0}^{hi} C(n, i)`, zero for an empty range.
fn binomial_prefix(n: u64, hi: i64) -> u128 {
    if hi < 0 {
        return 0;
    }
    (0..=hi as u64).map(|i| binomial(n, i)).sum()
}

/// Threshold function `T_{d,n}`: 1 exactly on inputs of Hamming weight at least `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub n: usize,
    pub d: usize,
}

impl ThresholdSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        check_vars(n)?;
        if d == 0 || d > n + 1 {
            return param(format!("threshold d must be in 1..={}, got {d}", n + 1));
        }
        Ok(Self { n, d })
    }

    /// `MAJ_n`: `T_{(n+1)/2, n}` for odd `n`, `T_{n/2+1, n}` for even `n`.
    pub fn majority(n: usize) -> Result<Self> {
        Self::new(n, n / 2 + 1)
    }
}

pub fn threshold_table(spec: ThresholdSpec) -> Result<TruthTable> {
    let ThresholdSpec { n, d } = ThresholdSpec::new(spec.n, spec.d)?;
    TruthTable::from_fn(n, |x| x.count_ones() as usize >= d)
}

pub fn majority_table(n: usize) -> Result<TruthTable> {
    threshold_table(ThresholdSpec::majority(n)?)
}

/// Closed-form nonlinearity of `T_{d,n}` for `1 <= d <= n`.
pub fn threshold_nonlinearity_exact(spec: ThresholdSpec) -> Result<u128> {
    let ThresholdSpec { n, d } = spec;
    check_vars(n)?;
    if d == 0 || d > n {
        return param(format!("closed form needs d in 1..={n}, got {d}"));
    }
    let (n64, d64) = (n as u64, d as u64);
    // compare d with (n+1)/2 without fractions
    let nl = match (2 * d).cmp(&(n + 1)) {
        std::cmp::Ordering::Equal => (1u128 << (n - 1)) - binomial(n64 - 1, (n64 - 1) / 2),
        std::cmp::Ordering::Greater => (d64..=n64).map(|k| binomial(n64, k)).sum(),
        std::cmp::Ordering::Less => binomial_prefix(n64, d as i64 - 1),
    };
    Ok(nl)
}

/// Nonlinearity of `MAJ_n` from the closed form.
pub fn majority_nonlinearity(n: usize) -> Result<u128> {
    threshold_nonlinearity_exact(ThresholdSpec::majority(n)?)
}

/// Checks that the closed form agrees on `d` and its mirror `n - d + 1`.
pub fn symmetry_check(n: usize, d: usize) -> Result<bool> {
    let a = threshold_nonlinearity_exact(ThresholdSpec { n, d })?;
    let b = threshold_nonlinearity_exact(ThresholdSpec { n, d: n + 1 - d })?;
    Ok(a == b)
}

/// Components of the `M`-based upper bound `2^{n-1} - sqrt(M)/2` on the
/// nonlinearity of monotone functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotoneBound {
    pub n: usize,
    /// Only defined for even `n`.
    pub a: Option<u128>,
    /// `None` when no `k` satisfies the parity constraint (only `n = 2`).
    pub b: Option<u128>,
    pub c: u128,
    pub m: u128,
    pub bound: f64,
}

impl MonotoneBound {
    /// Largest integer nonlinearity compatible with the bound.
    pub fn floor(&self) -> u64 {
        self.bound.floor() as u64
    }
}

fn bound_a(n: usize) -> u128 {
    let h = (n / 2) as u64;
    let top = 1i128 << h;
    let mut sum = 0u128;
    // 1 <= j < n/4, strict
    let mut j = 1u64;
    while 4 * j < n as u64 {
        let inner = top - 2 * binomial_prefix(h, j as i64) as i128;
        sum += binomial(h, j) * (inner * inner) as u128;
        j += 1;
    }
    let last = top - 2;
    (1u128 << n) + 2 * sum + (last * last) as u128
}

fn bound_b(n: usize) -> Option<u128> {
    (1..=n / 2)
        .filter(|k| (n + k).is_multiple_of(2))
        .map(|k| {
            let up = ((n + k) / 2) as u64;
            let down = ((n - k) / 2) as u64;
            let top = 1i128 << up;
            let lo = (n + k) as u64 / 4 + 1;
            let sum: u128 = (lo..=down)
                .map(|j| {
                    let inner = top - 2 * binomial_prefix(up, up as i64 - j as i64) as i128;
                    binomial(down, j) * (inner * inner) as u128
                })
                .sum();
            (1u128 << (n + k)) + sum
        })
        .min()
}

fn bound_c(n: usize) -> u128 {
    let n = n as u64;
    let k = if n.is_multiple_of(2) {
        n / 2
    } else {
        (n - 1) / 2
    };
    let c = 2 * binomial(n - 1, k);
    c * c
}

pub fn monotone_upper_bound(n: usize) -> Result<MonotoneBound> {
    if !(2..=crate::truth_table::MAX_VARS).contains(&n) {
        return param(format!("monotone bound needs 2 <= n <= 20, got {n}"));
    }
    let a = n.is_multiple_of(2).then(|| bound_a(n));
    let b = bound_b(n);
    let c = bound_c(n);
    let m = [a, b, Some(c)].into_iter().flatten().min().unwrap_or(c);
    let bound = (1u64 << (n - 1)) as f64 - (m as f64).sqrt() / 2.0;
    Ok(MonotoneBound {
        n,
        a,
        b,
        c,
        m,
        bound,
    })
}

/// `2^{n-1} - 2^{(n-1)/2}` for odd `n >= 5`, `2^{n-1} - 2^{n/2}` for even `n >= 10`.
pub fn simple_monotone_bound(n: usize) -> Result<u64> {
    let odd_ok = n % 2 == 1 && n >= 5;
    let even_ok = n.is_multiple_of(2) && n >= 10;
    if n > 63 || !(odd_ok || even_ok) {
        return param(format!(
            "simple monotone bound holds for odd n >= 5 or even n >= 10, got {n}"
        ));
    }
    let e = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 };
    Ok((1u64 << (n - 1)) - (1u64 << e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn threshold_rejects_bad_d() {
        assert!(ThresholdSpec::new(4, 0).is_err());
        assert!(ThresholdSpec::new(4, 6).is_err());
        assert!(threshold_nonlinearity_exact(ThresholdSpec { n: 4, d: 5 }).is_err());
        assert!(
            threshold_table(ThresholdSpec { n: 4, d: 5 })
                .unwrap()
                .weight()
                == 0
        );
    }

    #[test]
    fn majority_three() {
        let t = majority_table(3).unwrap();
        let ones: Vec<_> = t.support().collect();
        assert_eq!(ones, vec![0b011, 0b101, 0b110, 0b111]);
    }

    #[test]
    fn or_function() {
        let t = threshold_table(ThresholdSpec::new(7, 1).unwrap()).unwrap();
        assert_eq!(t.weight(), 127);
        assert_eq!(
            threshold_nonlinearity_exact(ThresholdSpec { n: 7, d: 1 }).unwrap(),
            1
        );
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(
            threshold_nonlinearity_exact(ThresholdSpec { n: 9, d: 5 }).unwrap(),
            186
        );
        assert_eq!(
            threshold_nonlinearity_exact(ThresholdSpec { n: 12, d: 7 }).unwrap(),
            1586
        );
        assert_eq!(majority_nonlinearity(6).unwrap(), 22);
        assert_eq!(ThresholdSpec::majority(6).unwrap().d, 4);
    }

    #[test]
    fn mirror_symmetry() {
        assert!(symmetry_check(10, 3).unwrap());
        assert!(symmetry_check(5, 3).unwrap());
        let a = threshold_nonlinearity_exact(ThresholdSpec { n: 6, d: 3 }).unwrap();
        let b = threshold_nonlinearity_exact(ThresholdSpec { n: 6, d: 4 }).unwrap();
        assert_eq!((a, b), (22, 22));
        for n in 1..=20 {
            for d in 1..=n {
                assert!(symmetry_check(n, d).unwrap());
            }
        }
    }

    #[test]
    fn bound_components_n5() {
        let b = monotone_upper_bound(5).unwrap();
        assert_eq!(b.a, None);
        assert_eq!(b.b, Some(64));
        assert_eq!(b.c, 144);
        assert_eq!(b.m, 64);
        assert_eq!(b.bound, 12.0);
        assert_eq!(b.floor(), 12);
    }

    #[test]
    fn bound_n2_has_no_b_term() {
        let b = monotone_upper_bound(2).unwrap();
        assert_eq!(b.b, None);
        assert_eq!(b.m, 4);
        assert!(monotone_upper_bound(1).is_err());
    }

    #[test]
    fn bound_values() {
        assert!((monotone_upper_bound(7).unwrap().bound - 55.5).abs() <= 0.05);
        assert!((monotone_upper_bound(14).unwrap().bound - 8013.1).abs() <= 0.05);
        // even n: A participates in the minimum
        let b6 = monotone_upper_bound(6).unwrap();
        assert_eq!((b6.a, b6.b, b6.c, b6.m), (Some(100), Some(256), 400, 100));
    }

    #[test]
    fn simple_bounds() {
        assert_eq!(simple_monotone_bound(5).unwrap(), 12);
        assert_eq!(simple_monotone_bound(10).unwrap(), 480);
        assert_eq!(simple_monotone_bound(9).unwrap(), 240);
        assert!(simple_monotone_bound(8).is_err());
        assert!(simple_monotone_bound(3).is_err());
    }
}
