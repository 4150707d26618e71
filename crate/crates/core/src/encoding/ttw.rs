//! Truth-table genome whose Hamming weight is fixed at `2^{n-1}`.
//!
//! Every constructor and operator preserves the weight, so decoded functions are
//! always balanced.

use rand::Rng;

use super::tt::{random_segment, shuffle_segment};
use crate::error::{param, Error, Result};
use crate::truth_table::TruthTable;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtwGenome {
    table: TruthTable,
}

impl TtwGenome {
    /// Wraps a balanced table; rejects anything else.
    pub fn new(table: TruthTable) -> Result<Self> {
        if !table.is_balanced() {
            return Err(Error::Contract(format!(
                "fixed-weight genome needs weight {}, got {}",
                table.len() / 2,
                table.weight()
            )));
        }
        Ok(Self { table })
    }

    /// Uniform over all balanced functions: half ones, then a full shuffle.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut table = TruthTable::zeros(n)?;
        let len = table.len();
        for i in 0..len / 2 {
            table.set(i, true);
        }
        shuffle_segment(&mut table, 0, len - 1, rng);
        Ok(Self { table })
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn into_table(self) -> TruthTable {
        self.table
    }

    /// Two-bit inversion or mixing, chosen with equal probability.
    pub fn mutate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if rng.gen_bool(0.5) {
            self.two_bit_inversion(rng);
        } else {
            self.mixing(rng);
        }
    }

    /// Flips one random 1-bit and one random 0-bit.
    pub fn two_bit_inversion<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let len = self.table.len();
        // half the positions qualify for each draw, so rejection terminates quickly
        let one = loop {
            let i = rng.gen_range(0..len);
            if self.table.get(i) {
                break i;
            }
        };
        let zero = loop {
            let i = rng.gen_range(0..len);
            if !self.table.get(i) {
                break i;
            }
        };
        self.table.flip(one);
        self.table.flip(zero);
    }

    /// Shuffles the genes between two random positions.
    pub fn mixing<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let (lo, hi) = random_segment(self.table.len(), rng);
        shuffle_segment(&mut self.table, lo, hi, rng);
    }

    pub fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> Result<Self> {
        let table = balanced_crossover(&self.table, &other.table, rng)?;
        Ok(Self { table })
    }
}

/// Weighted gene selection under a quota: scan left to right copying each gene
/// from a uniformly chosen parent until the child has `2^{n-1}` ones (the rest
/// become 0) or `2^{n-1}` zeros (the rest become 1).
pub fn balanced_crossover<R: Rng + ?Sized>(
    a: &TruthTable,
    b: &TruthTable,
    rng: &mut R,
) -> Result<TruthTable> {
    if a.n() != b.n() {
        return param(format!(
            "crossover of genomes with n = {} and n = {}",
            a.n(),
            b.n()
        ));
    }
    for p in [a, b] {
        if !p.is_balanced() {
            return Err(Error::Contract(format!(
                "balanced crossover parent has weight {} (need {})",
                p.weight(),
                p.len() / 2
            )));
        }
    }
    let len = a.len();
    let quota = len / 2;
    let mut child = TruthTable::zeros(a.n())?;
    let (mut ones, mut zeros) = (0usize, 0usize);
    for i in 0..len {
        let bit = if ones == quota {
            false
        } else if zeros == quota {
            true
        } else {
            let (x, y) = (a.get(i), b.get(i));
            // agreeing genes are copied without a draw
            if x == y || rng.gen_bool(0.5) {
                x
            } else {
                y
            }
        };
        if bit {
            child.set(i, true);
            ones += 1;
        } else {
            zeros += 1;
        }
    }
    Ok(child)
}
