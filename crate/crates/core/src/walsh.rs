//! Walsh-Hadamard spectrum and the properties derived from it.

use crate::truth_table::TruthTable;

/// `W_f(a) = sum_x (-1)^{f(x) + a.x}` for every `a`, indexed like the truth table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalshSpectrum {
    n: usize,
    coeffs: Vec<i32>,
}

/// Fast in-place butterfly over the signed table, `O(n 2^n)` additions.
pub fn walsh_transform(tt: &TruthTable) -> WalshSpectrum {
    let mut coeffs: Vec<i32> = tt.iter().map(|b| if b { -1 } else { 1 }).collect();
    let len = coeffs.len();
    let mut half = 1;
    while half < len {
        for block in coeffs.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half *= 2;
    }
    WalshSpectrum { n: tt.n(), coeffs }
}

/// `2^{n-1} - max_a |W_f(a)| / 2`.
pub fn nonlinearity(spectrum: &WalshSpectrum) -> u32 {
    spectrum.nonlinearity()
}

impl WalshSpectrum {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> u32 {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn nonlinearity(&self) -> u32 {
        // |W_f| and 2^n share parity, so the halving is exact.
        ((1u32 << self.n) - self.max_abs()) / 2
    }

    /// Number of indices `a` (including `a = 0`) where `|W_f(a)|` is maximal.
    pub fn max_vals_count(&self) -> usize {
        let m = self.max_abs();
        self.coeffs.iter().filter(|c| c.unsigned_abs() == m).count()
    }

    /// Nonlinearity and max-value count in one pass over the spectrum.
    pub fn nl_and_max_vals(&self) -> (u32, usize) {
        let mut max = 0u32;
        let mut count = 0usize;
        for c in &self.coeffs {
            let a = c.unsigned_abs();
            if a > max {
                max = a;
                count = 1;
            } else if a == max {
                count += 1;
            }
        }
        (((1u32 << self.n) - max) / 2, count)
    }

    pub fn is_balanced(&self) -> bool {
        self.coeffs[0] == 0
    }

    /// `sum_a W_f(a)^2`; equals `2^{2n}` for every Boolean function.
    pub fn energy(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|&c| (c as i64 * c as i64) as u64)
            .sum()
    }
}

/// `2^{n-1} - 2^{n/2-1}`, the covering radius bound on nonlinearity.
pub fn covering_radius_bound(n: usize) -> f64 {
    2f64.powi(n as i32 - 1) - 2f64.powf(n as f64 / 2.0 - 1.0)
}
