//! Steady-state evolutionary algorithm with 3-tournament worst elimination.
//!
//! Each iteration draws three distinct individuals, removes the worst, crosses
//! the two survivors, mutates the child with probability `mutation_probability`
//! and puts it in the freed slot. Every evaluation, including the initial
//! population, counts toward the budget.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`. Batch runs derive
//! per-run seeds with [`run_seed`], so results do not depend on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::mpsc;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{random_genome, Encoding, Genome, GpParams};
use crate::error::{param, Result};
use crate::fitness::{evaluate, FitnessReport, PenaltyVariant, Scenario};
use crate::truth_table::check_vars;

pub type EaRng = ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaConfig {
    pub n: usize,
    pub encoding: Encoding,
    pub scenario: Scenario,
    pub variant: PenaltyVariant,
    pub population_size: usize,
    pub evaluation_budget: u64,
    pub mutation_probability: f64,
    pub seed: u64,
    #[serde(default)]
    pub gp: GpParams,
}

impl EaConfig {
    pub const DEFAULT_POPULATION: usize = 500;
    pub const DEFAULT_BUDGET: u64 = 1_000_000;
    pub const DEFAULT_MUTATION_PROBABILITY: f64 = 0.5;

    /// Defaults for everything but the problem cell. The balanced scenario
    /// always uses the raw penalty.
    pub fn new(n: usize, encoding: Encoding, scenario: Scenario, variant: PenaltyVariant) -> Self {
        Self {
            n,
            encoding,
            scenario,
            variant: match scenario {
                Scenario::Balanced => PenaltyVariant::Fit1,
                Scenario::Imbalanced => variant,
            },
            population_size: Self::DEFAULT_POPULATION,
            evaluation_budget: Self::DEFAULT_BUDGET,
            mutation_probability: Self::DEFAULT_MUTATION_PROBABILITY,
            seed: 0,
            gp: GpParams::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.evaluation_budget = budget;
        self
    }

    pub fn with_population(mut self, size: usize) -> Self {
        self.population_size = size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_vars(self.n)?;
        if self.population_size < 3 {
            return param(format!(
                "population size must be at least 3, got {}",
                self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return param(format!(
                "mutation probability must be in [0, 1], got {}",
                self.mutation_probability
            ));
        }
        if self.scenario == Scenario::Balanced && self.variant != PenaltyVariant::Fit1 {
            return param("the balanced scenario only supports fit1");
        }
        if self.encoding == Encoding::Gp {
            self.gp.validate()?;
        }
        Ok(())
    }

    /// Short cell label, e.g. `imb-TT-fit2-n7`.
    pub fn label(&self) -> String {
        match self.scenario {
            Scenario::Balanced => format!("bal-{}-n{}", self.encoding, self.n),
            Scenario::Imbalanced => format!("imb-{}-{}-n{}", self.encoding, self.variant, self.n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: EaConfig,
    pub best_fitness: f64,
    pub best_nonlinearity: Option<u32>,
    pub best_report: FitnessReport,
    /// Truth-table text (TT/TTw) or prefix expression (GP).
    pub best_genome: String,
    pub evaluations_used: u64,
    /// `(evaluation, best-so-far fitness)` at every improvement.
    pub trajectory: Vec<(u64, f64)>,
    pub wall_time: f64,
}

impl RunRecord {
    /// Copy with the timing field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

struct Individual {
    genome: Genome,
    report: FitnessReport,
}

fn evaluate_genome(genome: &Genome, config: &EaConfig) -> FitnessReport {
    evaluate(&genome.decode(), config.scenario, config.variant)
}

/// Three distinct population indices in ascending order.
pub fn tournament<R: Rng + ?Sized>(rng: &mut R, population_size: usize) -> [usize; 3] {
    let drawn = sample(rng, population_size, 3);
    let mut picks = [drawn.index(0), drawn.index(1), drawn.index(2)];
    picks.sort_unstable();
    picks
}

/// Index of the worst of `picks` (ascending); ties go to the earliest index.
fn worst_of(pop: &[Individual], picks: &[usize; 3]) -> usize {
    let mut worst = picks[0];
    for &i in &picks[1..] {
        if pop[i].report.cmp_fitness(&pop[worst].report).is_lt() {
            worst = i;
        }
    }
    worst
}

/// A run in progress. [`run`] drives it to the budget; stepping by hand allows
/// inspecting the population between iterations.
pub struct Engine {
    config: EaConfig,
    rng: EaRng,
    pop: Vec<Individual>,
    evaluations: u64,
    best: (FitnessReport, Genome),
    trajectory: Vec<(u64, f64)>,
    start: Instant,
}

impl Engine {
    /// Validates the config and evaluates the initial population.
    pub fn new(config: &EaConfig) -> Result<Self> {
        config.validate()?;
        let start = Instant::now();
        let mut rng = EaRng::seed_from_u64(config.seed);
        let mut pop: Vec<Individual> = Vec::with_capacity(config.population_size);
        for _ in 0..config.population_size {
            let genome = random_genome(config.encoding, config.n, config.gp, &mut rng)?;
            let report = evaluate_genome(&genome, config);
            pop.push(Individual { genome, report });
        }
        let first = &pop[0];
        let mut engine = Self {
            config: config.clone(),
            rng,
            best: (first.report.clone(), first.genome.clone()),
            trajectory: vec![(1, first.report.fitness)],
            pop: Vec::new(),
            evaluations: 1,
            start,
        };
        for (k, ind) in pop.iter().enumerate().skip(1) {
            engine.evaluations = k as u64 + 1;
            engine.consider(&ind.report, &ind.genome);
        }
        engine.pop = pop;
        Ok(engine)
    }

    fn consider(&mut self, report: &FitnessReport, genome: &Genome) {
        if report.cmp_fitness(&self.best.0).is_gt() {
            self.best = (report.clone(), genome.clone());
            self.trajectory.push((self.evaluations, report.fitness));
        }
    }

    pub fn is_done(&self) -> bool {
        self.evaluations >= self.config.evaluation_budget
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn population(&self) -> impl ExactSizeIterator<Item = (&Genome, &FitnessReport)> {
        self.pop.iter().map(|ind| (&ind.genome, &ind.report))
    }

    pub fn best(&self) -> &FitnessReport {
        &self.best.0
    }

    /// One tournament, crossover, optional mutation and replacement; returns
    /// the replaced index.
    pub fn step(&mut self) -> Result<usize> {
        let picks = tournament(&mut self.rng, self.pop.len());
        let worst = worst_of(&self.pop, &picks);
        let mut survivors = picks.iter().copied().filter(|&i| i != worst);
        let (mut p1, mut p2) = (survivors.next().unwrap(), survivors.next().unwrap());
        if self.rng.gen_bool(0.5) {
            std::mem::swap(&mut p1, &mut p2);
        }
        let mut child = self.pop[p1]
            .genome
            .crossover(&self.pop[p2].genome, &mut self.rng)?;
        if self.rng.gen_bool(self.config.mutation_probability) {
            child.mutate(&mut self.rng);
        }
        let report = evaluate_genome(&child, &self.config);
        self.evaluations += 1;
        self.consider(&report, &child);
        self.pop[worst] = Individual {
            genome: child,
            report,
        };
        Ok(worst)
    }

    pub fn finish(self) -> RunRecord {
        let (best_report, best_genome) = self.best;
        RunRecord {
            best_fitness: best_report.fitness,
            best_nonlinearity: best_report.nonlinearity,
            best_genome: best_genome.to_text(),
            best_report,
            evaluations_used: self.evaluations,
            trajectory: self.trajectory,
            wall_time: self.start.elapsed().as_secs_f64(),
            config: self.config,
        }
    }
}

pub fn run(config: &EaConfig) -> Result<RunRecord> {
    let mut engine = Engine::new(config)?;
    while !engine.is_done() {
        engine.step()?;
    }
    Ok(engine.finish())
}

/// Seed of run `index` in a batch: the `index`-th output of a SplitMix64
/// stream started at `base`.
pub fn run_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `runs` independent copies of `config` with seeds from [`run_seed`].
pub fn run_batch(config: &EaConfig, runs: usize, parallelism: usize) -> Result<Vec<RunRecord>> {
    run_batch_with(config, runs, parallelism, |_, _| {})
}

/// Like [`run_batch`], calling `on_done(index, record)` on the calling thread as
/// each run finishes. Completion order depends on scheduling; the returned
/// vector is always in run order.
pub fn run_batch_with(
    config: &EaConfig,
    runs: usize,
    parallelism: usize,
    mut on_done: impl FnMut(usize, &RunRecord),
) -> Result<Vec<RunRecord>> {
    if runs == 0 {
        return param("runs must be at least 1");
    }
    config.validate()?;
    let config_for = |i: usize| EaConfig {
        seed: run_seed(config.seed, i as u64),
        ..config.clone()
    };
    let workers = parallelism.clamp(1, runs);
    let mut slots: Vec<Option<RunRecord>> = vec![None; runs];

    if workers == 1 {
        for (i, slot) in slots.iter_mut().enumerate() {
            let record = run(&config_for(i))?;
            on_done(i, &record);
            *slot = Some(record);
        }
    } else {
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel();
        std::thread::scope(|scope| -> Result<()> {
            for _ in 0..workers {
                let tx = tx.clone();
                let next = &next;
                let config_for = &config_for;
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                    if i >= runs {
                        break;
                    }
                    if tx.send((i, run(&config_for(i)))).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for (i, result) in rx {
                let record = result?;
                on_done(i, &record);
                slots[i] = Some(record);
            }
            Ok(())
        })?;
    }
    Ok(slots
        .into_iter()
        .map(|r| r.expect("every run completed"))
        .collect())
}

/// Best report among `budget` uniformly random truth tables.
pub fn random_search(
    n: usize,
    scenario: Scenario,
    variant: PenaltyVariant,
    budget: u64,
    seed: u64,
) -> Result<FitnessReport> {
    check_vars(n)?;
    if budget == 0 {
        return param("random search needs a positive budget");
    }
    let mut rng = EaRng::seed_from_u64(seed);
    let mut best: Option<FitnessReport> = None;
    for _ in 0..budget {
        let g = crate::encoding::TtGenome::random(n, &mut rng)?;
        let r = evaluate(g.table(), scenario, variant);
        if best.as_ref().is_none_or(|b| r.cmp_fitness(b).is_gt()) {
            best = Some(r);
        }
    }
    Ok(best.expect("budget is positive"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(encoding: Encoding, scenario: Scenario) -> EaConfig {
        EaConfig::new(5, encoding, scenario, PenaltyVariant::Fit1)
            .with_population(20)
            .with_budget(2_000)
            .with_seed(7)
    }

    #[test]
    fn config_validation() {
        let mut c = small(Encoding::Tt, Scenario::Imbalanced);
        assert!(c.validate().is_ok());
        c.population_size = 2;
        assert!(run(&c).is_err());
        let mut c = small(Encoding::Tt, Scenario::Balanced);
        c.variant = PenaltyVariant::Fit2;
        assert!(c.validate().is_err());
        let mut c = small(Encoding::Tt, Scenario::Imbalanced);
        c.mutation_probability = 1.5;
        assert!(c.validate().is_err());
        assert_eq!(
            EaConfig::new(5, Encoding::Tt, Scenario::Balanced, PenaltyVariant::Fit3).variant,
            PenaltyVariant::Fit1
        );
    }

    #[test]
    fn zero_budget_evaluates_population_only() {
        let c = small(Encoding::Tt, Scenario::Imbalanced).with_budget(0);
        let r = run(&c).unwrap();
        assert_eq!(r.evaluations_used, 20);
    }

    #[test]
    fn budget_respected_and_trajectory_nondecreasing() {
        for e in Encoding::ALL {
            let r = run(&small(e, Scenario::Imbalanced)).unwrap();
            assert_eq!(r.evaluations_used, 2_000);
            assert!(r
                .trajectory
                .windows(2)
                .all(|w| w[0].1 < w[1].1 && w[0].0 < w[1].0));
            assert_eq!(r.trajectory.last().unwrap().1, r.best_fitness);
        }
    }

    #[test]
    fn same_seed_same_record() {
        let c = small(Encoding::Gp, Scenario::Imbalanced);
        assert_eq!(
            run(&c).unwrap().without_timing(),
            run(&c).unwrap().without_timing()
        );
    }

    #[test]
    fn tie_break_eliminates_earliest() {
        let g = Genome::Tt(crate::encoding::TtGenome::new(
            crate::TruthTable::zeros(3).unwrap(),
        ));
        let c = small(Encoding::Tt, Scenario::Imbalanced);
        let rep = evaluate_genome(&g, &c);
        let pop: Vec<Individual> = (0..5)
            .map(|_| Individual {
                genome: g.clone(),
                report: rep.clone(),
            })
            .collect();
        assert_eq!(worst_of(&pop, &[1, 3, 4]), 1);
    }

    #[test]
    fn seeds_differ_per_run() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| run_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(run_seed(1, 0), run_seed(2, 0));
    }

    #[test]
    fn batch_rejects_zero_runs() {
        assert!(run_batch(&small(Encoding::Tt, Scenario::Balanced), 0, 1).is_err());
    }
}
