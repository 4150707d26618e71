//! Experiment configuration files (TOML).
//!
//! ```toml
//! runs = 30
//! budget = 1000000
//! seed = 1
//! parallelism = 4
//! out = "results"
//! population_size = 500
//! mutation_probability = 0.5
//!
//! [gp]
//! max_depth = 8
//! init_min_depth = 2
//! init_max_depth = 6
//!
//! [[cells]]
//! n = 6
//! encoding = "tt"
//! scenario = "balanced"
//!
//! [[matrix]]
//! n = [5, 6, 7]
//! encoding = ["tt", "gp"]
//! scenario = ["imbalanced"]
//! variant = ["fit1", "fit2", "fit3"]
//! ```
//!
//! `cells` lists single configurations, `matrix` blocks expand to the cartesian
//! product of their fields. Balanced cells always use `fit1`; duplicates are
//! dropped, keeping first-seen order.

use std::path::{Path, PathBuf};

use mbfevo::encoding::{Encoding, GpParams};
use mbfevo::engine::EaConfig;
use mbfevo::fitness::{PenaltyVariant, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub encoding: Encoding,
    pub scenario: Scenario,
    #[serde(default = "default_variant")]
    pub variant: PenaltyVariant,
}

fn default_variant() -> PenaltyVariant {
    PenaltyVariant::Fit1
}

impl Cell {
    fn normalized(mut self) -> Self {
        if self.scenario == Scenario::Balanced {
            self.variant = PenaltyVariant::Fit1;
        }
        self
    }

    /// Row label in the best-values table, e.g. `imb: TT, fit1`.
    pub fn row_label(&self) -> String {
        match self.scenario {
            Scenario::Balanced => format!("bal: {}", self.encoding),
            Scenario::Imbalanced => format!("imb: {}, {}", self.encoding, self.variant),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixBlock {
    n: Vec<usize>,
    encoding: Vec<Encoding>,
    scenario: Vec<Scenario>,
    #[serde(default = "default_matrix_variants")]
    variant: Vec<PenaltyVariant>,
}

fn default_matrix_variants() -> Vec<PenaltyVariant> {
    vec![PenaltyVariant::Fit1]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "default_runs")]
    runs: usize,
    #[serde(default = "default_budget")]
    budget: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_parallelism")]
    parallelism: usize,
    #[serde(default = "default_out")]
    out: PathBuf,
    #[serde(default = "default_population")]
    population_size: usize,
    #[serde(default = "default_mutation")]
    mutation_probability: f64,
    #[serde(default)]
    gp: GpParams,
    #[serde(default)]
    cells: Vec<Cell>,
    #[serde(default)]
    matrix: Vec<MatrixBlock>,
}

fn default_runs() -> usize {
    30
}
fn default_budget() -> u64 {
    EaConfig::DEFAULT_BUDGET
}
fn default_parallelism() -> usize {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("results")
}
fn default_population() -> usize {
    EaConfig::DEFAULT_POPULATION
}
fn default_mutation() -> f64 {
    EaConfig::DEFAULT_MUTATION_PROBABILITY
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub cells: Vec<Cell>,
    pub runs: usize,
    pub budget: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub parallelism: usize,
    pub population_size: usize,
    pub mutation_probability: f64,
    pub gp: GpParams,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub budget: Option<u64>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cells: Vec<Cell> = Vec::new();
        let expanded = raw.matrix.iter().flat_map(|m| {
            m.n.iter().flat_map(move |&n| {
                m.encoding.iter().flat_map(move |&encoding| {
                    m.scenario.iter().flat_map(move |&scenario| {
                        m.variant.iter().map(move |&variant| Cell {
                            n,
                            encoding,
                            scenario,
                            variant,
                        })
                    })
                })
            })
        });
        for cell in raw.cells.iter().copied().chain(expanded) {
            let cell = cell.normalized();
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        }
        let config = Self {
            cells,
            runs: raw.runs,
            budget: raw.budget,
            seed: raw.seed,
            out: raw.out,
            parallelism: raw.parallelism,
            population_size: raw.population_size,
            mutation_probability: raw.mutation_probability,
            gp: raw.gp,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::input(path))?;
        Self::parse(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(runs) = o.runs {
            self.runs = runs;
        }
        if let Some(budget) = o.budget {
            self.budget = budget;
        }
        if let Some(p) = o.parallelism {
            self.parallelism = p;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        self.validate()
    }

    pub fn ea_config(&self, cell: &Cell) -> EaConfig {
        EaConfig {
            population_size: self.population_size,
            evaluation_budget: self.budget,
            mutation_probability: self.mutation_probability,
            seed: self.seed,
            gp: self.gp,
            ..EaConfig::new(cell.n, cell.encoding, cell.scenario, cell.variant)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        if self.parallelism == 0 {
            return Err(CliError::Config("parallelism must be at least 1".into()));
        }
        for cell in &self.cells {
            self.ea_config(cell)
                .validate()
                .map_err(|e| CliError::Config(format!("cell {cell:?}: {e}")))?;
        }
        Ok(())
    }
}
