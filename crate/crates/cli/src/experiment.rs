//! Batch execution of an experiment matrix.
//!
//! Output layout under the configured directory:
//!
//! - `runs.csv`: one row per completed run, flushed as runs finish.
//! - `details/<cell>-run<k>.json`: the full [`RunRecord`] (trajectory, best genome).
//! - `summary.csv`: per-cell best/median/min nonlinearity and feasibility rate.
//! - `best_table.csv`: best nonlinearity per row label and `n`; `-` marks cells
//!   where no run found a feasible function.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use mbfevo::encoding::Encoding;
use mbfevo::engine::{run_batch_with, RunRecord};
use mbfevo::fitness::{PenaltyVariant, Scenario};
use serde::{Deserialize, Serialize};

use crate::config::{Cell, ExperimentConfig};
use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub cell: String,
    pub run: usize,
    pub seed: u64,
    pub n: usize,
    pub encoding: Encoding,
    pub scenario: Scenario,
    pub variant: PenaltyVariant,
    pub population_size: usize,
    pub budget: u64,
    pub evaluations_used: u64,
    pub feasible: bool,
    pub penalty_raw: u64,
    pub penalty_value: f64,
    pub bal_deficit: u64,
    pub nl: Option<u32>,
    pub max_vals: Option<usize>,
    pub fitness: f64,
    pub wall_time: f64,
}

impl RunRow {
    pub fn from_record(run: usize, r: &RunRecord) -> Self {
        let c = &r.config;
        Self {
            cell: c.label(),
            run,
            seed: c.seed,
            n: c.n,
            encoding: c.encoding,
            scenario: c.scenario,
            variant: c.variant,
            population_size: c.population_size,
            budget: c.evaluation_budget,
            evaluations_used: r.evaluations_used,
            feasible: r.best_report.is_feasible(),
            penalty_raw: r.best_report.penalty_raw,
            penalty_value: r.best_report.penalty_normalized,
            bal_deficit: r.best_report.bal_deficit,
            nl: r.best_report.nonlinearity,
            max_vals: r.best_report.max_vals_count,
            fitness: r.best_fitness,
            wall_time: r.wall_time,
        }
    }

    fn cell_key(&self) -> Cell {
        Cell {
            n: self.n,
            encoding: self.encoding,
            scenario: self.scenario,
            variant: self.variant,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub encoding: Encoding,
    pub scenario: Scenario,
    pub variant: PenaltyVariant,
    pub runs: usize,
    pub feasible_runs: usize,
    pub feasibility_rate: f64,
    pub best_nl: Option<u32>,
    pub median_nl: Option<f64>,
    pub min_nl: Option<u32>,
    pub best_fitness: f64,
}

impl CellSummary {
    pub fn cell(&self) -> Cell {
        Cell {
            n: self.n,
            encoding: self.encoding,
            scenario: self.scenario,
            variant: self.variant,
        }
    }
}

fn median(sorted: &[u32]) -> Option<f64> {
    match sorted.len() {
        0 => None,
        k if k % 2 == 1 => Some(sorted[k / 2] as f64),
        k => Some((sorted[k / 2 - 1] as f64 + sorted[k / 2] as f64) / 2.0),
    }
}

/// Groups rows by cell (first-seen order) and aggregates them.
pub fn summarize(rows: &[RunRow]) -> Vec<CellSummary> {
    let mut cells: Vec<Cell> = Vec::new();
    for r in rows {
        let key = r.cell_key();
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    cells
        .into_iter()
        .map(|cell| {
            let group: Vec<&RunRow> = rows.iter().filter(|r| r.cell_key() == cell).collect();
            let mut nls: Vec<u32> = group.iter().filter_map(|r| r.nl).collect();
            nls.sort_unstable();
            CellSummary {
                n: cell.n,
                encoding: cell.encoding,
                scenario: cell.scenario,
                variant: cell.variant,
                runs: group.len(),
                feasible_runs: nls.len(),
                feasibility_rate: nls.len() as f64 / group.len() as f64,
                best_nl: nls.last().copied(),
                median_nl: median(&nls),
                min_nl: nls.first().copied(),
                best_fitness: group
                    .iter()
                    .map(|r| r.fitness)
                    .fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

/// Rows ordered like the usual results table: balanced rows first, then
/// imbalanced, by encoding and variant. Columns are the sizes present.
pub fn best_table(summaries: &[CellSummary]) -> (Vec<usize>, Vec<(String, Vec<String>)>) {
    let sizes: Vec<usize> = summaries
        .iter()
        .map(|s| s.n)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows: Vec<Cell> = Vec::new();
    for scenario in [Scenario::Balanced, Scenario::Imbalanced] {
        for encoding in Encoding::ALL {
            for variant in PenaltyVariant::ALL {
                let probe = Cell {
                    n: 0,
                    encoding,
                    scenario,
                    variant,
                };
                let present = summaries.iter().any(|s| {
                    s.scenario == scenario && s.encoding == encoding && s.variant == variant
                });
                if present {
                    rows.push(probe);
                }
            }
        }
    }
    let table = rows
        .into_iter()
        .map(|row| {
            let cells = sizes
                .iter()
                .map(|&n| {
                    summaries
                        .iter()
                        .find(|s| s.cell() == Cell { n, ..row })
                        .map(|s| s.best_nl.map_or("-".to_string(), |v| v.to_string()))
                        .unwrap_or_default()
                })
                .collect();
            (row.row_label(), cells)
        })
        .collect();
    (sizes, table)
}

pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let rows = reader.deserialize().collect::<Result<Vec<RunRow>, _>>()?;
    Ok(rows)
}

pub fn write_summary_csv(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if summaries.is_empty() {
        w.write_record([
            "n",
            "encoding",
            "scenario",
            "variant",
            "runs",
            "feasible_runs",
            "feasibility_rate",
            "best_nl",
            "median_nl",
            "min_nl",
            "best_fitness",
        ])?;
    }
    for s in summaries {
        w.serialize(s)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}

pub fn write_best_table_csv(path: &Path, summaries: &[CellSummary]) -> Result<()> {
    let (sizes, rows) = best_table(summaries);
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["configuration".to_string()];
    header.extend(sizes.iter().map(|n| n.to_string()));
    w.write_record(&header)?;
    for (label, cells) in rows {
        let mut record = vec![label];
        record.extend(cells);
        w.write_record(&record)?;
    }
    w.flush().map_err(CliError::io(path))?;
    Ok(())
}

pub fn detail_path(out: &Path, record: &RunRecord, run: usize) -> PathBuf {
    out.join("details")
        .join(format!("{}-run{run:02}.json", record.config.label()))
}

#[derive(Debug)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub summaries: Vec<CellSummary>,
}

/// Runs every cell of the matrix and writes all artifacts under `config.out`.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let out = &config.out;
    fs::create_dir_all(out.join("details")).map_err(CliError::io(out))?;
    let runs_path = out.join("runs.csv");
    let file = File::create(&runs_path).map_err(CliError::io(&runs_path))?;
    let mut runs_csv = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(file);
    runs_csv.write_record([
        "cell",
        "run",
        "seed",
        "n",
        "encoding",
        "scenario",
        "variant",
        "population_size",
        "budget",
        "evaluations_used",
        "feasible",
        "penalty_raw",
        "penalty_value",
        "bal_deficit",
        "nl",
        "max_vals",
        "fitness",
        "wall_time",
    ])?;
    runs_csv.flush().map_err(CliError::io(&runs_path))?;

    let mut records = Vec::new();
    let mut rows = Vec::new();
    for cell in &config.cells {
        let ea = config.ea_config(cell);
        let mut write_err: Option<CliError> = None;
        let batch = run_batch_with(&ea, config.runs, config.parallelism, |i, record| {
            if write_err.is_some() {
                return;
            }
            let result = (|| -> Result<()> {
                runs_csv.serialize(RunRow::from_record(i, record))?;
                runs_csv.flush().map_err(CliError::io(&runs_path))?;
                let path = detail_path(out, record, i);
                let mut f = File::create(&path).map_err(CliError::io(&path))?;
                serde_json::to_writer_pretty(&mut f, record)?;
                f.write_all(b"\n").map_err(CliError::io(&path))?;
                Ok(())
            })();
            if let Err(e) = result {
                write_err = Some(e);
            }
        })?;
        if let Some(e) = write_err {
            return Err(e);
        }
        rows.extend(
            batch
                .iter()
                .enumerate()
                .map(|(i, r)| RunRow::from_record(i, r)),
        );
        records.extend(batch);
    }

    let summaries = summarize(&rows);
    write_summary_csv(&out.join("summary.csv"), &summaries)?;
    write_best_table_csv(&out.join("best_table.csv"), &summaries)?;
    Ok(RunOutcome { records, summaries })
}
