//! The robot search problem and the repeated-experiment driver.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::body::{decode, descriptors, BodyGraph, BodyLimits};
use crate::lsystem::{self, Genotype, RewriteConfig};
use crate::report::RobotRow;
use crate::sim::{simulate, EvalResult, SimConfig, SimError};

use super::{run_evolution, EvolutionConfig, Individual, Mode, MoeaError, Problem};

/// Cached evaluation of one robot.
#[derive(Debug, Clone)]
pub struct RobotPayload {
    pub body: BodyGraph,
    pub eval: EvalResult,
}

/// Decode-and-simulate problem over L-system genotypes.
#[derive(Debug, Clone)]
pub struct RobotProblem {
    pub rewrite: RewriteConfig,
    pub limits: BodyLimits,
    pub sim: SimConfig,
    pub mode: Mode,
}

impl RobotProblem {
    pub fn new(mode: Mode) -> Self {
        Self {
            rewrite: RewriteConfig::default(),
            limits: BodyLimits::default(),
            sim: SimConfig::default(),
            mode,
        }
    }
}

impl Problem for RobotProblem {
    type Genome = Genotype;
    type Payload = RobotPayload;

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Genotype {
        lsystem::random_genotype(rng)
    }

    fn crossover(&self, a: &Genotype, b: &Genotype, rng: &mut ChaCha8Rng) -> Genotype {
        lsystem::crossover(a, b, rng)
    }

    fn mutate(&self, genome: &Genotype, rng: &mut ChaCha8Rng) -> Genotype {
        lsystem::mutate(genome, rng)
    }

    fn evaluate(&self, genome: &Genotype) -> Result<(RobotPayload, Vec<f64>), SimError> {
        let tokens = lsystem::rewrite(genome, &self.rewrite);
        let body =
            decode(&tokens, self.limits).expect("rewriting a valid genotype always yields a core");
        let eval = simulate(&body, &self.sim)?;
        let objectives = match self.mode {
            Mode::Baseline => vec![eval.speed],
            Mode::Battery => vec![eval.speed, eval.battery_remaining],
        };
        Ok((RobotPayload { body, eval }, objectives))
    }
}

fn row_for(
    mode: Mode,
    rep: u32,
    gen: u32,
    idx: usize,
    ind: &Individual<Genotype, RobotPayload>,
) -> RobotRow {
    let d = descriptors(&ind.payload.body);
    let e = &ind.payload.eval;
    RobotRow {
        experiment: mode.name().to_string(),
        run: rep,
        generation: gen,
        robot_id: idx as u32,
        n_modules: d.size,
        n_bricks: d.n_bricks,
        n_joints: d.n_joints,
        branching: d.branching,
        proportion: d.proportion,
        speed_cms: e.speed,
        battery_remaining: e.battery_remaining,
        balance: e.balance,
        alive_steps: e.alive_steps,
        genotype: ind.genome.to_string(),
    }
}

/// Runs `repetitions` independent evolution runs and logs every surviving
/// individual of every generation. Repetitions execute in parallel; rows come
/// back ordered by (repetition, generation, index).
pub fn run_experiment(
    problem: &RobotProblem,
    cfg: &EvolutionConfig,
    repetitions: u32,
) -> Result<Vec<RobotRow>, MoeaError> {
    cfg.validate()?;
    debug_assert_eq!(
        problem.mode, cfg.mode,
        "problem and config modes must agree"
    );
    let per_rep: Vec<Vec<RobotRow>> = (0..repetitions)
        .into_par_iter()
        .map(|rep| {
            let mut rows = Vec::with_capacity(cfg.mu * cfg.generations as usize);
            run_evolution(problem, cfg, rep, |gen, pop| {
                for (i, ind) in pop.iter().enumerate() {
                    rows.push(row_for(cfg.mode, rep, gen, i, ind));
                }
            })?;
            Ok(rows)
        })
        .collect::<Result<_, MoeaError>>()?;
    Ok(per_rep.into_iter().flatten().collect())
}
