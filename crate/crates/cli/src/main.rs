use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mbfevo::fitness::PenaltyVariant;
use mbfevo_cli::analyze::cmd_analyze;
use mbfevo_cli::config::{ExperimentConfig, Overrides};
use mbfevo_cli::experiment::{best_table, cmd_run};
use mbfevo_cli::penalty::{cmd_penalty_sample, write_penalty_csv, DEFAULT_SAMPLES};
use mbfevo_cli::reference::{cmd_reference, write_reference_csv};
use mbfevo_cli::{CliError, Result};

/// Evolutionary search for monotone Boolean functions with high nonlinearity.
#[derive(Debug, Parser)]
#[command(name = "mbfevo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment matrix described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        parallelism: Option<usize>,
        /// Output directory (overrides `out` in the file).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Penalty statistics of random functions per Hamming weight.
    PenaltySample {
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value = "fit1")]
        variant: PenaltyVariant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounds and literature values for a range of sizes.
    Reference {
        #[arg(default_value_t = 5)]
        from: usize,
        #[arg(default_value_t = 14)]
        to: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Properties of a truth table, GP expression or run detail file.
    Analyze {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            CliError::Io {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            seed,
            runs,
            budget,
            parallelism,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.apply(&Overrides {
                seed,
                runs,
                budget,
                parallelism,
                out,
            })?;
            let outcome = cmd_run(&cfg)?;
            let (sizes, rows) = best_table(&outcome.summaries);
            let header: Vec<String> = sizes.iter().map(|n| format!("{n:>6}")).collect();
            println!("{:<16}{}", "", header.concat());
            for (label, cells) in rows {
                let cells: Vec<String> = cells.iter().map(|c| format!("{c:>6}")).collect();
                println!("{label:<16}{}", cells.concat());
            }
            println!(
                "{} runs written to {}",
                outcome.records.len(),
                cfg.out.display()
            );
        }
        Command::PenaltySample {
            n,
            samples,
            variant,
            seed,
            out,
        } => {
            let rows = cmd_penalty_sample(n, samples, variant, seed)?;
            write_penalty_csv(output(out.as_deref())?, &rows)?;
        }
        Command::Reference { from, to, out } => {
            let rows = cmd_reference(from, to)?;
            write_reference_csv(output(out.as_deref())?, &rows)?;
        }
        Command::Analyze { file, json } => {
            let (analysis, record) = cmd_analyze(&file)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&analysis)?);
            } else {
                print!("{analysis}");
            }
            if !analysis.consistent_with_log(record.as_ref()) {
                return Err(CliError::Inconsistent(
                    "recomputed fitness differs from the logged report".into(),
                ));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
