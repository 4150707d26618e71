//! Distribution of the non-monotone penalty over random functions of fixed weight.

use std::io::Write;

use mbfevo::encoding::tt::shuffle_segment;
use mbfevo::fitness::{penalty_variant, PenaltyVariant};
use mbfevo::monotone::monotonicity_report;
use mbfevo::TruthTable;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_SAMPLES: usize = 200;
pub const MAX_SAMPLE_VARS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PenaltyRow {
    pub weight: usize,
    pub samples: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

/// Uniform random function of weight exactly `w`: `w` ones, then a full shuffle.
pub fn random_fixed_weight(n: usize, w: usize, rng: &mut ChaCha8Rng) -> Result<TruthTable> {
    let mut tt = TruthTable::zeros(n)?;
    let len = tt.len();
    if w > len {
        return Err(CliError::Config(format!("weight {w} exceeds 2^{n}")));
    }
    for i in 0..w {
        tt.set(i, true);
    }
    shuffle_segment(&mut tt, 0, len - 1, rng);
    Ok(tt)
}

/// One row per weight `0..=2^n`, `samples` functions each.
pub fn cmd_penalty_sample(
    n: usize,
    samples: usize,
    variant: PenaltyVariant,
    seed: u64,
) -> Result<Vec<PenaltyRow>> {
    if n == 0 || n > MAX_SAMPLE_VARS {
        return Err(CliError::Config(format!(
            "penalty sampling needs 1 <= n <= {MAX_SAMPLE_VARS}"
        )));
    }
    if samples == 0 {
        return Err(CliError::Config(
            "samples per weight must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=1usize << n)
        .map(|w| {
            let values = (0..samples)
                .map(|_| {
                    let tt = random_fixed_weight(n, w, &mut rng)?;
                    Ok(penalty_variant(&monotonicity_report(&tt), variant))
                })
                .collect::<Result<Vec<f64>>>()?;
            let k = values.len() as f64;
            let mean = values.iter().sum::<f64>() / k;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
            Ok(PenaltyRow {
                weight: w,
                samples,
                mean,
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                stddev: var.sqrt(),
            })
        })
        .collect()
}

pub fn write_penalty_csv<W: Write>(out: W, rows: &[PenaltyRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(CliError::io("<penalty output>"))?;
    Ok(())
}
