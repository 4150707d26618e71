//! Penalised fitness for monotone functions.
//!
//! Infeasible candidates score the negated penalty (plus the balancedness deficit
//! in the balanced scenario) and are therefore always negative. Feasible
//! candidates score `nl + (2^n - #max_vals) / 2^n`, which lies in `[nl, nl + 1)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::monotone::{monotonicity_report, MonotonicityReport};
use crate::truth_table::TruthTable;
use crate::walsh::walsh_transform;

/// Normalisation applied to the raw violation count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyVariant {
    /// raw count
    Fit1,
    /// count / max_possible
    Fit2,
    /// count / max_possible^2
    Fit3,
}

impl PenaltyVariant {
    pub const ALL: [PenaltyVariant; 3] = [Self::Fit1, Self::Fit2, Self::Fit3];
}

impl fmt::Display for PenaltyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fit1 => "fit1",
            Self::Fit2 => "fit2",
            Self::Fit3 => "fit3",
        })
    }
}

impl FromStr for PenaltyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "fit1" => Ok(Self::Fit1),
            "fit2" => Ok(Self::Fit2),
            "fit3" => Ok(Self::Fit3),
            _ => Err(Error::Parameter(format!("unknown penalty variant {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Monotone and balanced; penalty is always the raw count.
    #[serde(alias = "bal")]
    Balanced,
    /// Monotone only.
    #[serde(alias = "imb")]
    Imbalanced,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Balanced => "bal",
            Self::Imbalanced => "imb",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "bal" | "balanced" => Ok(Self::Balanced),
            "imb" | "imbalanced" => Ok(Self::Imbalanced),
            _ => Err(Error::Parameter(format!("unknown scenario {s:?}"))),
        }
    }
}

pub fn penalty_variant(report: &MonotonicityReport, variant: PenaltyVariant) -> f64 {
    if report.violations == 0 {
        return 0.0;
    }
    let v = report.violations as f64;
    let m = report.max_possible as f64;
    match variant {
        PenaltyVariant::Fit1 => v,
        PenaltyVariant::Fit2 => v / m,
        PenaltyVariant::Fit3 => v / (m * m),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub penalty_raw: u64,
    pub max_possible: u64,
    /// Penalty after the variant's normalisation.
    pub penalty_normalized: f64,
    pub bal_deficit: u64,
    /// Present only for feasible functions.
    pub nonlinearity: Option<u32>,
    /// Present only for feasible functions.
    pub max_vals_count: Option<usize>,
    pub fitness: f64,
}

impl FitnessReport {
    pub fn is_feasible(&self) -> bool {
        self.nonlinearity.is_some()
    }

    /// Total order on fitness. Feasible scores are dyadic rationals with at most
    /// 20 fractional bits, so they compare exactly as `f64`.
    pub fn cmp_fitness(&self, other: &Self) -> Ordering {
        self.fitness.total_cmp(&other.fitness)
    }

    /// The `2^n - #max_vals` numerator of the fractional term, for feasible reports.
    pub fn fraction_numerator(&self, n: usize) -> Option<usize> {
        self.max_vals_count.map(|m| (1usize << n) - m)
    }
}

fn spectral_term(tt: &TruthTable) -> (u32, usize, f64) {
    let (nl, max_vals) = walsh_transform(tt).nl_and_max_vals();
    let len = tt.len();
    (
        nl,
        max_vals,
        nl as f64 + (len - max_vals) as f64 / len as f64,
    )
}

/// `-penalty - BAL + [penalty = 0][BAL = 0] (nl + (2^n - #max_vals) / 2^n)`.
pub fn fitness_balanced(tt: &TruthTable) -> FitnessReport {
    let report = monotonicity_report(tt);
    let bal = tt.balancedness_deficit() as u64;
    let mut out = FitnessReport {
        penalty_raw: report.violations,
        max_possible: report.max_possible,
        penalty_normalized: report.violations as f64,
        bal_deficit: bal,
        nonlinearity: None,
        max_vals_count: None,
        fitness: -(report.violations as f64) - bal as f64,
    };
    if report.violations == 0 && bal == 0 {
        let (nl, mv, score) = spectral_term(tt);
        out.nonlinearity = Some(nl);
        out.max_vals_count = Some(mv);
        out.fitness = score;
    }
    out
}

/// `-penalty_variant + [violations = 0] (nl + (2^n - #max_vals) / 2^n)`.
pub fn fitness_imbalanced(tt: &TruthTable, variant: PenaltyVariant) -> FitnessReport {
    let report = monotonicity_report(tt);
    let penalty = penalty_variant(&report, variant);
    let mut out = FitnessReport {
        penalty_raw: report.violations,
        max_possible: report.max_possible,
        penalty_normalized: penalty,
        bal_deficit: tt.balancedness_deficit() as u64,
        nonlinearity: None,
        max_vals_count: None,
        fitness: -penalty,
    };
    if report.violations == 0 {
        let (nl, mv, score) = spectral_term(tt);
        out.nonlinearity = Some(nl);
        out.max_vals_count = Some(mv);
        out.fitness = score;
    }
    out
}

/// Dispatches on scenario; `variant` is ignored in the balanced scenario.
pub fn evaluate(tt: &TruthTable, scenario: Scenario, variant: PenaltyVariant) -> FitnessReport {
    match scenario {
        Scenario::Balanced => fitness_balanced(tt),
        Scenario::Imbalanced => fitness_imbalanced(tt, variant),
    }
}
