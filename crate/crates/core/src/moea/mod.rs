//! Evolutionary engine: (μ+λ) evolution with tournament parent selection and
//! either elitist non-dominated truncation or tournament survivor selection.
//!
//! The engine is generic over a [`Problem`] so the same machinery drives both
//! the robot experiments and analytic test problems. All variation decisions
//! for one offspring come from a stream keyed by (seed, repetition,
//! generation, offspring index), which makes runs reproducible regardless of
//! how evaluations are parallelized.

mod robot;
mod sort;

pub use robot::{run_experiment, RobotPayload, RobotProblem};
pub use sort::{crowding_distances, dominates, fast_nondominated_sort, nsga2_truncation};

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::seeds::{rng_for, Stream};
use crate::sim::SimError;

/// Which experiment objectives an evolution run optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Single objective: speed.
    Baseline,
    /// Two objectives: speed and remaining battery.
    Battery,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::Battery => "battery",
        }
    }

    pub fn n_objectives(&self) -> usize {
        match self {
            Mode::Baseline => 1,
            Mode::Battery => 2,
        }
    }

    fn comparator(&self) -> Comparator {
        match self {
            Mode::Baseline => Comparator::HighestFirstObjective,
            Mode::Battery => Comparator::Crowded,
        }
    }
}

/// How the next generation is chosen from parents plus offspring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurvivorSelection {
    /// Canonical elitist truncation by fronts and crowding.
    Nsga2Truncation,
    /// Repeated tournaments over the pool, winners removed.
    Tournament,
}

/// Evolution parameters.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub mu: usize,
    pub lambda: usize,
    pub generations: u32,
    pub tournament_k: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub mode: Mode,
    pub survivor_selection: SurvivorSelection,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            mu: 100,
            lambda: 100,
            generations: 100,
            tournament_k: 4,
            p_crossover: 0.8,
            p_mutation: 0.8,
            mode: Mode::Battery,
            survivor_selection: SurvivorSelection::Nsga2Truncation,
            master_seed: 42,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), MoeaError> {
        if self.mu < 1 {
            return Err(MoeaError::Config("mu must be at least 1".into()));
        }
        if self.lambda < 1 {
            return Err(MoeaError::Config("lambda must be at least 1".into()));
        }
        if self.tournament_k < 1 {
            return Err(MoeaError::Config("tournament_k must be at least 1".into()));
        }
        for (name, p) in [
            ("p_crossover", self.p_crossover),
            ("p_mutation", self.p_mutation),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(MoeaError::Config(format!("{name} must be in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MoeaError {
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A candidate solution: genome plus cached evaluation and ranking state.
#[derive(Debug, Clone)]
pub struct Individual<G, P> {
    pub genome: G,
    pub payload: P,
    pub objectives: Vec<f64>,
    /// Front index assigned by the latest non-dominated sort.
    pub rank: usize,
    /// Crowding distance within that front.
    pub crowding: f64,
}

/// Population of one problem's individuals.
pub type Population<P> = Vec<Individual<<P as Problem>::Genome, <P as Problem>::Payload>>;

/// Everything the engine needs to know about a concrete search problem.
pub trait Problem: Sync {
    type Genome: Clone + Send + Sync;
    type Payload: Send;

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn crossover(&self, a: &Self::Genome, b: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn mutate(&self, genome: &Self::Genome, rng: &mut ChaCha8Rng) -> Self::Genome;
    /// Evaluates a genome into its payload and maximized objective vector.
    fn evaluate(&self, genome: &Self::Genome) -> Result<(Self::Payload, Vec<f64>), SimError>;
}

/// Parent-selection ordering; `Less` means better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    /// Maximize the first objective; ties by lower index.
    HighestFirstObjective,
    /// Lower rank, then higher crowding, then lower index.
    Crowded,
}

fn compare<G, P>(cmp: Comparator, pop: &[Individual<G, P>], a: usize, b: usize) -> Ordering {
    match cmp {
        Comparator::HighestFirstObjective => pop[b].objectives[0]
            .total_cmp(&pop[a].objectives[0])
            .then_with(|| a.cmp(&b)),
        Comparator::Crowded => pop[a]
            .rank
            .cmp(&pop[b].rank)
            .then_with(|| pop[b].crowding.total_cmp(&pop[a].crowding))
            .then_with(|| a.cmp(&b)),
    }
}

/// Best index among `candidates` under the comparator.
pub fn tournament_winner<G, P>(
    pop: &[Individual<G, P>],
    candidates: &[usize],
    cmp: Comparator,
) -> usize {
    *candidates
        .iter()
        .min_by(|&&a, &&b| compare(cmp, pop, a, b))
        .expect("tournament needs at least one candidate")
}

/// Samples `k` individuals uniformly with replacement and returns the winner.
pub fn tournament_select<G, P>(
    pop: &[Individual<G, P>],
    k: usize,
    cmp: Comparator,
    rng: &mut ChaCha8Rng,
) -> usize {
    let candidates: Vec<usize> = (0..k).map(|_| rng.gen_range(0..pop.len())).collect();
    tournament_winner(pop, &candidates, cmp)
}

/// Recomputes rank and crowding for every member of `pop`.
pub fn assign_fronts<G, P>(pop: &mut [Individual<G, P>]) {
    let objs: Vec<Vec<f64>> = pop.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_nondominated_sort(&objs);
    for (rank, front) in fronts.iter().enumerate() {
        let front_objs: Vec<&[f64]> = front.iter().map(|&i| objs[i].as_slice()).collect();
        let dists = crowding_distances(&front_objs);
        for (&i, &d) in front.iter().zip(&dists) {
            pop[i].rank = rank;
            pop[i].crowding = d;
        }
    }
}

fn evaluate_genomes<P: Problem>(
    problem: &P,
    genomes: Vec<P::Genome>,
) -> Result<Population<P>, MoeaError> {
    genomes
        .into_par_iter()
        .map(|genome| {
            let (payload, objectives) = problem.evaluate(&genome)?;
            Ok(Individual {
                genome,
                payload,
                objectives,
                rank: usize::MAX,
                crowding: 0.0,
            })
        })
        .collect::<Result<Vec<_>, SimError>>()
        .map_err(MoeaError::from)
}

/// Builds and evaluates the μ random genomes of repetition `rep`.
pub fn initial_population<P: Problem>(
    problem: &P,
    cfg: &EvolutionConfig,
    rep: u32,
) -> Result<Population<P>, MoeaError> {
    let genomes = (0..cfg.mu)
        .map(|i| {
            let mut rng = rng_for(cfg.master_seed, rep, Stream::Init { index: i as u32 });
            problem.random_genome(&mut rng)
        })
        .collect();
    let mut pop = evaluate_genomes(problem, genomes)?;
    assign_fronts(&mut pop);
    Ok(pop)
}

/// Tournament-based survivor selection: winners are removed from the pool so
/// the μ selected slots are distinct.
fn survivor_tournament<G, P>(
    pool: &[Individual<G, P>],
    mu: usize,
    k: usize,
    cmp: Comparator,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..pool.len()).collect();
    let mut selected = Vec::with_capacity(mu);
    while selected.len() < mu && !remaining.is_empty() {
        let candidates: Vec<usize> = (0..k)
            .map(|_| remaining[rng.gen_range(0..remaining.len())])
            .collect();
        let winner = tournament_winner(pool, &candidates, cmp);
        let at = remaining
            .iter()
            .position(|&i| i == winner)
            .expect("winner is in the pool");
        remaining.remove(at);
        selected.push(winner);
    }
    selected
}

/// Runs one generation: λ offspring by tournament selection, crossover and
/// mutation, then survivor selection over parents plus offspring.
pub fn evolve_generation<P: Problem>(
    problem: &P,
    cfg: &EvolutionConfig,
    rep: u32,
    gen: u32,
    parents: Population<P>,
) -> Result<Population<P>, MoeaError> {
    let cmp = cfg.mode.comparator();

    let mut offspring_genomes = Vec::with_capacity(cfg.lambda);
    for o in 0..cfg.lambda {
        let mut rng = rng_for(
            cfg.master_seed,
            rep,
            Stream::Offspring {
                gen,
                index: o as u32,
            },
        );
        let p1 = tournament_select(&parents, cfg.tournament_k, cmp, &mut rng);
        let p2 = tournament_select(&parents, cfg.tournament_k, cmp, &mut rng);
        let mut child = if rng.gen_bool(cfg.p_crossover) {
            problem.crossover(&parents[p1].genome, &parents[p2].genome, &mut rng)
        } else {
            parents[p1].genome.clone()
        };
        if rng.gen_bool(cfg.p_mutation) {
            child = problem.mutate(&child, &mut rng);
        }
        offspring_genomes.push(child);
    }

    let offspring = evaluate_genomes(problem, offspring_genomes)?;
    let mut pool = parents;
    pool.extend(offspring);
    assign_fronts(&mut pool);

    let selected = match cfg.survivor_selection {
        SurvivorSelection::Nsga2Truncation => {
            let objs: Vec<&[f64]> = pool.iter().map(|i| i.objectives.as_slice()).collect();
            nsga2_truncation(&objs, cfg.mu)
        }
        SurvivorSelection::Tournament => {
            let mut rng = rng_for(cfg.master_seed, rep, Stream::Survivors { gen });
            survivor_tournament(&pool, cfg.mu, cfg.tournament_k, cmp, &mut rng)
        }
    };

    let mut slots: Vec<Option<Individual<P::Genome, P::Payload>>> =
        pool.into_iter().map(Some).collect();
    Ok(selected
        .into_iter()
        .map(|i| slots[i].take().expect("survivor indices are distinct"))
        .collect())
}

/// Evolves one repetition for the configured number of generations, invoking
/// `visit` with each post-selection population (generations are 1-based).
pub fn run_evolution<P: Problem>(
    problem: &P,
    cfg: &EvolutionConfig,
    rep: u32,
    mut visit: impl FnMut(u32, &[Individual<P::Genome, P::Payload>]),
) -> Result<Population<P>, MoeaError> {
    cfg.validate()?;
    let mut pop = initial_population(problem, cfg, rep)?;
    for gen in 1..=cfg.generations {
        pop = evolve_generation(problem, cfg, rep, gen, pop)?;
        visit(gen, &pop);
    }
    Ok(pop)
}
