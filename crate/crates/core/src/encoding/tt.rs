//! Unconstrained truth-table genome.

use rand::Rng;

use crate::error::{param, Result};
use crate::truth_table::{tail_mask, TruthTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtGenome {
    table: TruthTable,
}

impl TtGenome {
    pub fn new(table: TruthTable) -> Self {
        Self { table }
    }

    /// Uniform random bitstring of length `2^n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let mut table = TruthTable::zeros(n)?;
        let mask = tail_mask(n);
        for w in table.words_mut() {
            *w = rng.gen::<u64>() & mask;
        }
        Ok(Self { table })
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn into_table(self) -> TruthTable {
        self.table
    }

    /// Bit flip or segment shuffle, chosen with equal probability.
    pub fn mutate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if rng.gen_bool(0.5) {
            self.bit_flip(rng);
        } else {
            shuffle_mutation(&mut self.table, rng);
        }
    }

    pub fn bit_flip<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let i = rng.gen_range(0..self.table.len());
        self.table.flip(i);
    }

    /// One-point or uniform crossover, chosen with equal probability.
    pub fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> Result<Self> {
        if self.table.n() != other.table.n() {
            return param(format!(
                "crossover of genomes with n = {} and n = {}",
                self.table.n(),
                other.table.n()
            ));
        }
        let table = if rng.gen_bool(0.5) {
            let point = rng.gen_range(0..=self.table.len());
            one_point_crossover(&self.table, &other.table, point)
        } else {
            uniform_crossover(&self.table, &other.table, rng)
        };
        Ok(Self { table })
    }
}

/// Positions `< point` from `a`, the rest from `b`.
pub fn one_point_crossover(a: &TruthTable, b: &TruthTable, point: usize) -> TruthTable {
    let mut child = a.clone();
    for (k, (c, bw)) in child.words_mut().iter_mut().zip(b.words()).enumerate() {
        let start = k * 64;
        if point <= start {
            *c = *bw;
        } else if point < start + 64 {
            let keep = (1u64 << (point - start)) - 1;
            *c = (*c & keep) | (bw & !keep);
        }
    }
    child
}

/// Each position copied from a uniformly chosen parent.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &TruthTable,
    b: &TruthTable,
    rng: &mut R,
) -> TruthTable {
    let mut child = a.clone();
    for (c, bw) in child.words_mut().iter_mut().zip(b.words()) {
        let m: u64 = rng.gen();
        *c = (*c & m) | (bw & !m);
    }
    child
}

/// Two uniformly chosen positions, sorted; the segment is inclusive.
pub(crate) fn random_segment<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..len);
    let j = rng.gen_range(0..len);
    (i.min(j), i.max(j))
}

/// Uniform random permutation of the bits in `lo..=hi` (Fisher-Yates).
pub fn shuffle_segment<R: Rng + ?Sized>(tt: &mut TruthTable, lo: usize, hi: usize, rng: &mut R) {
    for k in (lo + 1..=hi).rev() {
        let r = rng.gen_range(lo..=k);
        let (bk, br) = (tt.get(k), tt.get(r));
        if bk != br {
            tt.set(k, br);
            tt.set(r, bk);
        }
    }
}

pub(crate) fn shuffle_mutation<R: Rng + ?Sized>(tt: &mut TruthTable, rng: &mut R) {
    let (lo, hi) = random_segment(tt.len(), rng);
    shuffle_segment(tt, lo, hi, rng);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bit_flip_on_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=8 {
            let mut g = TtGenome::new(TruthTable::zeros(n).unwrap());
            g.bit_flip(&mut rng);
            assert_eq!(g.table().weight(), 1);
        }
    }

    #[test]
    fn shuffle_preserves_segment_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let g = TtGenome::random(7, &mut rng).unwrap();
            let mut t = g.table().clone();
            let (lo, hi) = random_segment(t.len(), &mut rng);
            let seg = |t: &TruthTable| (lo..=hi).filter(|&i| t.get(i)).count();
            let before = seg(&t);
            shuffle_segment(&mut t, lo, hi, &mut rng);
            assert_eq!(seg(&t), before);
            assert!((0..lo)
                .chain(hi + 1..t.len())
                .all(|i| t.get(i) == g.table().get(i)));
        }
    }

    #[test]
    fn one_point_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = TtGenome::random(8, &mut rng).unwrap();
        let b = TtGenome::random(8, &mut rng).unwrap();
        assert_eq!(&one_point_crossover(a.table(), b.table(), 0), b.table());
        assert_eq!(&one_point_crossover(a.table(), b.table(), 256), a.table());
        for p in [1, 63, 64, 65, 100, 200] {
            let c = one_point_crossover(a.table(), b.table(), p);
            for i in 0..256 {
                let src = if i < p { a.table() } else { b.table() };
                assert_eq!(c.get(i), src.get(i));
            }
        }
        let small_a = TruthTable::zeros(3).unwrap();
        let small_b = TruthTable::ones(3).unwrap();
        assert_eq!(
            one_point_crossover(&small_a, &small_b, 3).bit_string(),
            "00011111"
        );
    }

    #[test]
    fn identical_parents_reproduce() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = TtGenome::random(6, &mut rng).unwrap();
        for _ in 0..50 {
            assert_eq!(a.crossover(&a, &mut rng).unwrap(), a);
        }
    }

    #[test]
    fn crossover_takes_each_bit_from_a_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = TtGenome::random(7, &mut rng).unwrap();
        let b = TtGenome::random(7, &mut rng).unwrap();
        for _ in 0..100 {
            let c = a.crossover(&b, &mut rng).unwrap();
            assert!((0..128)
                .all(|i| c.table().get(i) == a.table().get(i)
                    || c.table().get(i) == b.table().get(i)));
        }
        let small = TtGenome::random(3, &mut rng).unwrap();
        assert!(a.crossover(&small, &mut rng).is_err());
    }

    #[test]
    fn random_small_tables_keep_tail_clear() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..6 {
            let g = TtGenome::random(n, &mut rng).unwrap();
            assert_eq!(g.table().words()[0] & !tail_mask(n), 0);
        }
    }
}
