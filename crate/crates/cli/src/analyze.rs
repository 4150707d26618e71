//! Full property report for a single function.
//!
//! Accepted inputs:
//! - truth-table text (`n` on the first line, `2^n` bits on the second);
//! - a GP prefix expression, optionally preceded by a line holding `n`
//!   (otherwise `n` is the largest variable index used);
//! - a run detail JSON written by `run`, whose best genome is re-evaluated.

use std::fmt;
use std::path::Path;

use mbfevo::encoding::{Encoding, GpGenome, GpParams};
use mbfevo::engine::RunRecord;
use mbfevo::fitness::{fitness_balanced, fitness_imbalanced, FitnessReport, PenaltyVariant};
use mbfevo::monotone::{monotonicity_report, MonotonicityReport};
use mbfevo::walsh::walsh_transform;
use mbfevo::TruthTable;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Analysis {
    pub n: usize,
    pub weight: usize,
    pub balanced: bool,
    pub bal_deficit: usize,
    pub monotonicity: MonotonicityReport,
    pub monotone: bool,
    pub nonlinearity: u32,
    pub max_vals: usize,
    pub fitness_balanced: FitnessReport,
    pub fitness_fit1: FitnessReport,
    pub fitness_fit2: FitnessReport,
    pub fitness_fit3: FitnessReport,
    /// Report stored in the run detail, when the input was one.
    pub logged: Option<FitnessReport>,
}

impl Analysis {
    /// The fitness report matching the logged run's configuration, if any.
    pub fn recomputed_for(&self, record: &RunRecord) -> &FitnessReport {
        match (record.config.scenario, record.config.variant) {
            (mbfevo::fitness::Scenario::Balanced, _) => &self.fitness_balanced,
            (_, PenaltyVariant::Fit1) => &self.fitness_fit1,
            (_, PenaltyVariant::Fit2) => &self.fitness_fit2,
            (_, PenaltyVariant::Fit3) => &self.fitness_fit3,
        }
    }

    /// Whether the recomputed report equals the logged one (true when nothing was logged).
    pub fn consistent_with_log(&self, record: Option<&RunRecord>) -> bool {
        match (record, &self.logged) {
            (Some(r), Some(logged)) => self.recomputed_for(r) == logged,
            _ => true,
        }
    }
}

pub fn analyze_table(tt: &TruthTable) -> Analysis {
    let spectrum = walsh_transform(tt);
    let (nonlinearity, max_vals) = spectrum.nl_and_max_vals();
    let monotonicity = monotonicity_report(tt);
    Analysis {
        n: tt.n(),
        weight: tt.weight(),
        balanced: spectrum.is_balanced(),
        bal_deficit: tt.balancedness_deficit(),
        monotone: monotonicity.is_monotone(),
        monotonicity,
        nonlinearity,
        max_vals,
        fitness_balanced: fitness_balanced(tt),
        fitness_fit1: fitness_imbalanced(tt, PenaltyVariant::Fit1),
        fitness_fit2: fitness_imbalanced(tt, PenaltyVariant::Fit2),
        fitness_fit3: fitness_imbalanced(tt, PenaltyVariant::Fit3),
        logged: None,
    }
}

/// Decodes a serialised genome of the given encoding.
pub fn decode_genome(encoding: Encoding, n: usize, gp: GpParams, text: &str) -> Result<TruthTable> {
    Ok(match encoding {
        Encoding::Tt | Encoding::Ttw => TruthTable::parse_text(text)?,
        Encoding::Gp => GpGenome::parse(text.trim(), n, gp)?.decode(),
    })
}

/// Parsed input plus the run record it came from, if any.
pub fn load_function(text: &str) -> Result<(TruthTable, Option<RunRecord>)> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let record: RunRecord = serde_json::from_str(trimmed)?;
        let c = &record.config;
        let tt = decode_genome(c.encoding, c.n, c.gp, &record.best_genome)?;
        return Ok((tt, Some(record)));
    }
    let mut lines = trimmed.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = lines
        .next()
        .ok_or_else(|| CliError::Config("empty function file".into()))?;
    if let Ok(n) = first.parse::<usize>() {
        let rest: Vec<&str> = lines.collect();
        let body = rest.join(" ");
        if !body.is_empty() && body.chars().all(|c| c == '0' || c == '1') {
            return Ok((TruthTable::parse_text(trimmed)?, None));
        }
        let gp = permissive_gp(n);
        return Ok((GpGenome::parse(&body, n, gp)?.decode(), None));
    }
    // bare expression: size from the variables it uses
    let probe = GpGenome::parse(trimmed, mbfevo::truth_table::MAX_VARS, permissive_gp(20))?;
    let n = GpGenome::min_vars(probe.nodes());
    let tree = GpGenome::from_nodes(n, probe.nodes().to_vec(), permissive_gp(n))?;
    Ok((tree.decode(), None))
}

/// Analysis accepts trees of any depth.
fn permissive_gp(_n: usize) -> GpParams {
    GpParams {
        max_depth: usize::MAX,
        ..GpParams::default()
    }
}

pub fn cmd_analyze(path: &Path) -> Result<(Analysis, Option<RunRecord>)> {
    let text = std::fs::read_to_string(path).map_err(CliError::input(path))?;
    analyze_text(&text)
}

pub fn analyze_text(text: &str) -> Result<(Analysis, Option<RunRecord>)> {
    let (tt, record) = load_function(text)?;
    let mut analysis = analyze_table(&tt);
    analysis.logged = record.as_ref().map(|r| r.best_report.clone());
    Ok((analysis, record))
}

fn fmt_report(f: &mut fmt::Formatter<'_>, name: &str, r: &FitnessReport) -> fmt::Result {
    writeln!(
        f,
        "{name:<18} {:.6}  (penalty {}, normalized {:.6}, bal deficit {})",
        r.fitness, r.penalty_raw, r.penalty_normalized, r.bal_deficit
    )
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n                  {}", self.n)?;
        writeln!(f, "weight             {}", self.weight)?;
        writeln!(
            f,
            "balanced           {} (deficit {})",
            self.balanced, self.bal_deficit
        )?;
        writeln!(
            f,
            "monotone           {} (violations {} of {} possible)",
            self.monotone, self.monotonicity.violations, self.monotonicity.max_possible
        )?;
        writeln!(f, "nonlinearity       {}", self.nonlinearity)?;
        writeln!(f, "max_vals           {}", self.max_vals)?;
        fmt_report(f, "fitness bal", &self.fitness_balanced)?;
        fmt_report(f, "fitness imb fit1", &self.fitness_fit1)?;
        fmt_report(f, "fitness imb fit2", &self.fitness_fit2)?;
        fmt_report(f, "fitness imb fit3", &self.fitness_fit3)?;
        if let Some(logged) = &self.logged {
            writeln!(f, "logged fitness     {:.6}", logged.fitness)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mbfevo::bounds::majority_table;

    #[test]
    fn majority_nine() {
        let text = majority_table(9).unwrap().to_text();
        let (a, rec) = analyze_text(&text).unwrap();
        assert!(rec.is_none());
        assert!(a.monotone);
        assert_eq!(a.nonlinearity, 186);
    }

    #[test]
    fn all_zeros() {
        let (a, _) = analyze_text("4\n0000000000000000\n").unwrap();
        assert!(a.monotone);
        assert!(!a.balanced);
        assert_eq!(a.nonlinearity, 0);
        assert!(a.to_string().contains("nonlinearity       0"));
    }

    #[test]
    fn gp_inputs() {
        let (a, _) = analyze_text("OR(AND(x1, x2), OR(AND(x2, x3), AND(x1, x3)))").unwrap();
        assert_eq!(a.n, 3);
        assert_eq!(a.nonlinearity, 2);
        assert!(a.monotone);
        let (b, _) = analyze_text("5\nAND(x1, x2)").unwrap();
        assert_eq!(b.n, 5);
        assert_eq!(b.weight, 8);
    }

    #[test]
    fn malformed_inputs() {
        assert!(analyze_text("").is_err());
        assert!(analyze_text("3\n0101").is_err());
        assert!(analyze_text("AND(x1").is_err());
        assert!(analyze_text("{ not json").is_err());
    }
}
