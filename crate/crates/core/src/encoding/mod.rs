//! Genome representations and their variation operators.

pub mod gp;
pub mod tt;
pub mod ttw;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::truth_table::TruthTable;

pub use gp::{GpGenome, GpParams, Node, TreeCrossover};
pub use tt::TtGenome;
pub use ttw::TtwGenome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// Raw truth table.
    Tt,
    /// Truth table with weight fixed at `2^{n-1}`.
    Ttw,
    /// Expression tree.
    Gp,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::Tt, Encoding::Ttw, Encoding::Gp];
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Tt => "TT",
            Encoding::Ttw => "TTw",
            Encoding::Gp => "GP",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tt" => Ok(Encoding::Tt),
            "ttw" => Ok(Encoding::Ttw),
            "gp" => Ok(Encoding::Gp),
            _ => Err(Error::Parameter(format!("unknown encoding {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Genome {
    Tt(TtGenome),
    Ttw(TtwGenome),
    Gp(GpGenome),
}

pub fn random_genome<R: Rng + ?Sized>(
    encoding: Encoding,
    n: usize,
    gp: GpParams,
    rng: &mut R,
) -> Result<Genome> {
    Ok(match encoding {
        Encoding::Tt => Genome::Tt(TtGenome::random(n, rng)?),
        Encoding::Ttw => Genome::Ttw(TtwGenome::random(n, rng)?),
        Encoding::Gp => Genome::Gp(GpGenome::random(n, gp, rng)?),
    })
}

impl Genome {
    pub fn encoding(&self) -> Encoding {
        match self {
            Genome::Tt(_) => Encoding::Tt,
            Genome::Ttw(_) => Encoding::Ttw,
            Genome::Gp(_) => Encoding::Gp,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Genome::Tt(g) => g.table().n(),
            Genome::Ttw(g) => g.table().n(),
            Genome::Gp(g) => g.n(),
        }
    }

    pub fn decode(&self) -> TruthTable {
        match self {
            Genome::Tt(g) => g.table().clone(),
            Genome::Ttw(g) => g.table().clone(),
            Genome::Gp(g) => g.decode(),
        }
    }

    pub fn mutate<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        match self {
            Genome::Tt(g) => g.mutate(rng),
            Genome::Ttw(g) => g.mutate(rng),
            Genome::Gp(g) => g.mutate(rng),
        }
    }

    pub fn crossover<R: Rng + ?Sized>(&self, other: &Self, rng: &mut R) -> Result<Self> {
        Ok(match (self, other) {
            (Genome::Tt(a), Genome::Tt(b)) => Genome::Tt(a.crossover(b, rng)?),
            (Genome::Ttw(a), Genome::Ttw(b)) => Genome::Ttw(a.crossover(b, rng)?),
            (Genome::Gp(a), Genome::Gp(b)) => Genome::Gp(a.crossover(b, rng)?),
            _ => {
                return param(format!(
                    "crossover between {} and {} genomes",
                    self.encoding(),
                    other.encoding()
                ))
            }
        })
    }

    /// Truth-table text for TT/TTw, prefix notation for GP.
    pub fn to_text(&self) -> String {
        match self {
            Genome::Tt(g) => g.table().to_text(),
            Genome::Ttw(g) => g.table().to_text(),
            Genome::Gp(g) => g.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn encodings_parse_and_print() {
        for e in Encoding::ALL {
            assert_eq!(e.to_string().parse::<Encoding>().unwrap(), e);
        }
        assert!("cgp".parse::<Encoding>().is_err());
    }

    #[test]
    fn mixed_crossover_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let a = random_genome(Encoding::Tt, 4, GpParams::default(), &mut rng).unwrap();
        let b = random_genome(Encoding::Ttw, 4, GpParams::default(), &mut rng).unwrap();
        assert!(a.crossover(&b, &mut rng).is_err());
    }

    #[test]
    fn decode_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for e in Encoding::ALL {
            let g = random_genome(e, 7, GpParams::default(), &mut rng).unwrap();
            assert_eq!(g.decode(), g.decode());
            assert_eq!(g.n(), 7);
        }
    }
}
