//! Bit-packed truth tables.
//!
//! A function of `n` variables is stored as `2^n` bits packed little-endian into
//! `u64` words. Entry `i` is `f(x)` where bit `j` of `i` is the value of `x_{j+1}`,
//! so index order is the lexicographic order with `x_1` varying fastest.

use std::fmt;
use std::str::FromStr;

use crate::error::{param, Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: usize = 20;

/// Masks selecting the positions whose index has bit `j` set, for `j < 6`.
pub(crate) const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

pub(crate) fn word_count(n: usize) -> usize {
    if n >= 6 {
        1 << (n - 6)
    } else {
        1
    }
}

/// Mask of the meaningful bits in the last (or only) word.
pub(crate) fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

pub(crate) fn check_vars(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return param(format!("variable count must be in 1..={MAX_VARS}, got {n}"));
    }
    Ok(())
}

impl TruthTable {
    /// The constant-zero function.
    pub fn zeros(n: usize) -> Result<Self> {
        check_vars(n)?;
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
        })
    }

    /// The constant-one function.
    pub fn ones(n: usize) -> Result<Self> {
        check_vars(n)?;
        let mut words = vec![u64::MAX; word_count(n)];
        if n < 6 {
            words[0] = tail_mask(n);
        }
        Ok(Self { n, words })
    }

    /// Builds a table by evaluating `f` on every input index.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut tt = Self::zeros(n)?;
        for i in 0..tt.len() {
            if f(i) {
                tt.set(i, true);
            }
        }
        Ok(tt)
    }

    /// Builds a table from an explicit output vector; its length must be a power of two.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let len = bits.len();
        if len < 2 || !len.is_power_of_two() {
            return param(format!("truth table length {len} is not 2^n with n >= 1"));
        }
        let n = len.trailing_zeros() as usize;
        Self::from_fn(n, |i| bits[i])
    }

    /// Wraps raw words. Bits beyond `2^n` must be zero.
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        check_vars(n)?;
        if words.len() != word_count(n) {
            return param(format!(
                "expected {} words for n = {n}, got {}",
                word_count(n),
                words.len()
            ));
        }
        if words[0] & !tail_mask(n) != 0 {
            return param("bits set beyond the end of the truth table");
        }
        Ok(Self { n, words })
    }

    /// The projection `x_{j+1}` (0-indexed variable `j`).
    pub fn variable(n: usize, j: usize) -> Result<Self> {
        check_vars(n)?;
        if j >= n {
            return param(format!("variable index {j} out of range for n = {n}"));
        }
        let mut words = vec![0u64; word_count(n)];
        if j < 6 {
            let m = VAR_MASKS[j] & tail_mask(n);
            words.iter_mut().for_each(|w| *w = m);
        } else {
            let stride = 1usize << (j - 6);
            for (k, w) in words.iter_mut().enumerate() {
                if k & stride != 0 {
                    *w = u64::MAX;
                }
            }
        }
        Ok(Self { n, words })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Mutable word access. Callers must keep bits beyond `2^n` clear.
    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len());
        let bit = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len());
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Hamming weight of the output vector.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|w_H(f) - 2^{n-1}|`: how many bits must change to make `f` balanced.
    pub fn balancedness_deficit(&self) -> usize {
        self.weight().abs_diff(self.len() / 2)
    }

    pub fn is_balanced(&self) -> bool {
        self.balancedness_deficit() == 0
    }

    /// Hamming distance to another table of the same size.
    pub fn distance(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n, "distance between tables of different size");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// The output-complemented function `f ^ 1`.
    pub fn complement(&self) -> Self {
        let mask = tail_mask(self.n);
        let words = self.words.iter().map(|w| !w & mask).collect();
        Self { n: self.n, words }
    }

    /// Relabels inputs so that variable `j` of `self` becomes variable `perm[j]`
    /// of the result.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return param("input permutation must be a permutation of 0..n");
        }
        Self::from_fn(n, |x| {
            let y = (0..n).fold(0usize, |acc, j| acc | (((x >> perm[j]) & 1) << j));
            self.get(y)
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Indices of the 1-entries, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some((k << 6) | b)
            })
        })
    }

    /// Serialises to the two-line text format: `n`, then `2^n` characters `0`/`1`.
    pub fn to_text(&self) -> String {
        format!("{}\n{}\n", self.n, self.bit_string())
    }

    pub fn bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Parses the two-line text format. Blank lines and surrounding whitespace are ignored.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, first) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            line: ln,
            msg: format!("expected variable count, got {first:?}"),
        })?;
        check_vars(n).map_err(|e| Error::Parse {
            line: ln,
            msg: e.to_string(),
        })?;
        let (ln, body) = lines.next().ok_or(Error::Parse {
            line: ln + 1,
            msg: "missing truth table line".into(),
        })?;
        if let Some((extra, _)) = lines.next() {
            return Err(Error::Parse {
                line: extra,
                msg: "unexpected trailing content".into(),
            });
        }
        if body.len() != 1 << n {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {} characters, got {}", 1usize << n, body.len()),
            });
        }
        let mut tt = Self::zeros(n)?;
        for (i, c) in body.chars().enumerate() {
            match c {
                '0' => {}
                '1' => tt.set(i, true),
                other => {
                    return Err(Error::Parse {
                        line: ln,
                        msg: format!("invalid character {other:?} at position {i}"),
                    })
                }
            }
        }
        Ok(tt)
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.bit_string())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bit_string())
    }
}
