//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with the measured evidence (run with `--nocapture` to see them).
//!
//! Oracles used here (front peeling, hypervolume sweeps) are written
//! independently of the library code paths they check.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use morphevo::body::{decode, BodyLimits};
use morphevo::calibrate::pressure_scaled_charge;
use morphevo::config::{RunConfig, RunMode};
use morphevo::lsystem::{crossover, mutate, random_genotype, rewrite, RewriteConfig};
use morphevo::moea::{
    crowding_distances, fast_nondominated_sort, run_evolution, EvolutionConfig, Mode, Problem,
    RobotProblem,
};
use morphevo::pipeline::run_and_write;
use morphevo::report::RobotRow;
use morphevo::sim::{compute_power, simulate_with_trace, BatteryState, SimConfig, SimError};
use morphevo::stats::{aggregate_generation, extract_pareto, welch_t, SummaryStats};

// ---------------------------------------------------------------------------
// criterion 1: battery arithmetic exactness

#[test]
fn criterion_1_battery_arithmetic_exact() {
    assert!((compute_power(&[(2.0, 0.5), (1.0, -1.0), (-3.0, 0.2)]) - 1.0).abs() < 1e-12);
    assert!((compute_power(&[(4.0, 0.25)]) - 1.0).abs() < 1e-12);
    assert_eq!(compute_power(&[(9.0, 0.0), (0.0, 3.0)]), 0.0);

    // accumulation: remaining charge is the start minus the per-step sums
    let demands = [0.125, 0.5, 0.0625, 0.25, 0.03125];
    let mut battery = BatteryState::new(10.0);
    let mut spent = 0.0;
    for &d in &demands {
        assert!(!battery.drain(d));
        spent += d;
        assert!((battery.remaining() - (10.0 - spent)).abs() < 1e-12);
    }

    // constant drain of 0.5 against a charge of 10 stops at exactly step 20
    let mut battery = BatteryState::new(10.0);
    let mut stop_step = 0;
    for step in 1..=1000 {
        if battery.drain(0.5) {
            stop_step = step;
            break;
        }
    }
    assert_eq!(stop_step, 20);
    assert_eq!(battery.remaining(), 0.0);

    println!("PASS criterion 1: power and charge arithmetic exact to 1e-12, constant drain stops at step 20");
}

// ---------------------------------------------------------------------------
// criterion 2: non-dominated sorting equals the brute-force peeling oracle

/// Brute-force oracle: repeatedly peel the set of points dominated by nobody
/// still present.
fn oracle_fronts(objs: &[Vec<f64>]) -> Vec<Vec<usize>> {
    fn dom(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
    }
    let mut remaining: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !remaining.is_empty() {
        let front: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !remaining.iter().any(|&j| dom(&objs[j], &objs[i])))
            .collect();
        remaining.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

#[test]
fn criterion_2_sorting_matches_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let n = rng.gen_range(2..=64);
        // half the cases snap values to a coarse grid to force duplicates
        let snap = case % 2 == 0;
        let objs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..2)
                    .map(|_| {
                        let v: f64 = rng.gen_range(0.0..1.0);
                        if snap {
                            (v * 4.0).floor() / 4.0
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        assert_eq!(
            fast_nondominated_sort(&objs),
            oracle_fronts(&objs),
            "case {case}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS criterion 2: 200 random populations match the peeling oracle exactly in {elapsed:?}"
    );
}

// ---------------------------------------------------------------------------
// criterion 3: NSGA-II convergence on an analytic front

/// Maximize f1 = x and f2 = 1 - x² over x in [0, 1].
struct ParabolaProblem;

impl Problem for ParabolaProblem {
    type Genome = Vec<f64>;
    type Payload = ();

    fn random_genome(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![rng.gen_range(0.0..=1.0)]
    }

    fn crossover(&self, a: &Vec<f64>, b: &Vec<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let w: f64 = rng.gen_range(0.0..=1.0);
        vec![w * a[0] + (1.0 - w) * b[0]]
    }

    fn mutate(&self, g: &Vec<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![(g[0] + rng.gen_range(-0.1..=0.1)).clamp(0.0, 1.0)]
    }

    fn evaluate(&self, g: &Vec<f64>) -> Result<((), Vec<f64>), SimError> {
        let x = g[0];
        Ok(((), vec![x, 1.0 - x * x]))
    }
}

/// 2D hypervolume for maximization against the reference point (0, 0):
/// sweep points by descending f1, accumulating fresh f2 strips.
fn hypervolume(points: &[(f64, f64)]) -> f64 {
    let mut sorted: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(a, b)| a > 0.0 || b > 0.0)
        .collect();
    sorted.sort_by(|p, q| q.0.total_cmp(&p.0));
    let mut hv = 0.0;
    let mut best_f2 = 0.0f64;
    for (f1, f2) in sorted {
        if f2 > best_f2 {
            hv += f1.max(0.0) * (f2 - best_f2);
            best_f2 = f2;
        }
    }
    hv
}

#[test]
fn criterion_3_nsga2_recovers_analytic_front() {
    let start = Instant::now();

    // oracle: the true front, densely sampled
    let dense: Vec<(f64, f64)> = (0..=100_000)
        .map(|i| {
            let x = i as f64 / 100_000.0;
            (x, 1.0 - x * x)
        })
        .collect();
    let true_hv = hypervolume(&dense);
    assert!(
        (true_hv - 2.0 / 3.0).abs() < 1e-4,
        "oracle sanity: {true_hv}"
    );

    let cfg = EvolutionConfig {
        mu: 40,
        lambda: 40,
        generations: 50,
        mode: Mode::Battery, // bi-objective settings
        master_seed: 7,
        ..EvolutionConfig::default()
    };
    let final_pop = run_evolution(&ParabolaProblem, &cfg, 0, |_, _| {}).unwrap();
    let front: Vec<(f64, f64)> = final_pop
        .iter()
        .filter(|i| i.rank == 0)
        .map(|i| (i.objectives[0], i.objectives[1]))
        .collect();
    let hv = hypervolume(&front);

    let elapsed = start.elapsed();
    assert!(
        hv >= 0.95 * true_hv,
        "hypervolume {hv:.4} is below 95% of the true front's {true_hv:.4}"
    );
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("PASS criterion 3: front hypervolume {hv:.4} >= 95% of {true_hv:.4} in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// criterion 4: directional trend reproduction at desk scale

const DESK_SEED: u64 = 42;

fn desk_evolution(mode: Mode) -> EvolutionConfig {
    EvolutionConfig {
        mu: 24,
        lambda: 24,
        generations: 40,
        mode,
        master_seed: DESK_SEED,
        ..EvolutionConfig::default()
    }
}

fn final_generation(rows: &[RobotRow]) -> Vec<&RobotRow> {
    let last = rows.iter().map(|r| r.generation).max().unwrap();
    rows.iter().filter(|r| r.generation == last).collect()
}

#[test]
fn criterion_4_desk_scale_trends() {
    let start = Instant::now();
    let baseline = morphevo::moea::run_experiment(
        &RobotProblem::new(Mode::Baseline),
        &desk_evolution(Mode::Baseline),
        5,
    )
    .unwrap();
    let battery = morphevo::moea::run_experiment(
        &RobotProblem::new(Mode::Battery),
        &desk_evolution(Mode::Battery),
        5,
    )
    .unwrap();

    let base_final = final_generation(&baseline);
    let batt_final = final_generation(&battery);
    let median = |values: Vec<f64>| aggregate_generation(&values).unwrap().0;

    // (a) pooled final median speed: baseline above battery
    let base_speed = median(base_final.iter().map(|r| r.speed_cms).collect());
    let batt_speed = median(batt_final.iter().map(|r| r.speed_cms).collect());
    assert!(
        base_speed > batt_speed,
        "(a) baseline median speed {base_speed} vs battery {batt_speed}"
    );

    // (b) pooled final median remaining battery: battery mode above baseline
    let base_charge = median(base_final.iter().map(|r| r.battery_remaining).collect());
    let batt_charge = median(batt_final.iter().map(|r| r.battery_remaining).collect());
    assert!(
        batt_charge > base_charge,
        "(b) battery median charge {batt_charge} vs baseline {base_charge}"
    );

    // (c) the pooled battery Pareto set contains a full-charge non-mover
    let pool: Vec<RobotRow> = batt_final.iter().map(|r| (*r).clone()).collect();
    let flags = extract_pareto(&pool).unwrap();
    let c_start = SimConfig::default().c_start;
    assert!(
        pool.iter()
            .zip(&flags)
            .any(|(r, &nd)| nd && r.speed_cms == 0.0 && r.battery_remaining == c_start),
        "(c) no non-dominated robot with speed 0 and full charge"
    );

    // (d) mean joint count: battery at or below baseline
    let mean_joints = |rows: &[&RobotRow]| {
        rows.iter().map(|r| r.n_joints as f64).sum::<f64>() / rows.len() as f64
    };
    let base_joints = mean_joints(&base_final);
    let batt_joints = mean_joints(&batt_final);
    assert!(
        batt_joints <= base_joints,
        "(d) battery mean joints {batt_joints} vs baseline {base_joints}"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "PASS criterion 4: speed {base_speed:.2} > {batt_speed:.2}, charge {batt_charge:.2} > {base_charge:.2}, \
         full-charge non-mover on the front, joints {batt_joints:.2} <= {base_joints:.2} ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// criterion 5: Welch's t-test reproduces the published significance calls

#[test]
fn criterion_5_welch_significance() {
    // speed of robots with many joints: significant
    let large = welch_t(
        &SummaryStats::new(71, 5.35, 1.29),
        &SummaryStats::new(940, 4.33, 2.0),
    )
    .unwrap();
    assert!((large.t - 6.13).abs() < 0.05, "t = {}", large.t);
    assert!(large.p_two_sided < 0.001, "p = {}", large.p_two_sided);

    // joint counts of fast robots: not significant
    let small = welch_t(
        &SummaryStats::new(9, 7.44, 2.35),
        &SummaryStats::new(91, 8.88, 0.32),
    )
    .unwrap();
    assert!((small.t.abs() - 1.84).abs() < 0.05, "t = {}", small.t);
    assert!((small.df - 8.0).abs() < 0.2, "df = {}", small.df);
    assert!(small.p_two_sided > 0.05, "p = {}", small.p_two_sided);

    println!(
        "PASS criterion 5: t = {:.3} (p = {:.2e} < 1e-3) and t = {:.3}, df = {:.2} (p = {:.3} > 0.05)",
        large.t, large.p_two_sided, small.t, small.df, small.p_two_sided
    );
}

// ---------------------------------------------------------------------------
// criterion 6: byte-identical logs under different parallelism

#[test]
fn criterion_6_determinism_across_parallelism() {
    let run_with_threads = |threads: usize| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            evolution: desk_evolution(Mode::Battery),
            repetitions: 5,
            mode: RunMode::Both,
            out_dir: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let path = pool.install(|| run_and_write(&cfg)).unwrap();
        let bytes = std::fs::read(path).unwrap();
        drop(dir);
        bytes
    };

    let serial = run_with_threads(1);
    let parallel = run_with_threads(8);
    assert_eq!(
        serial, parallel,
        "robots.csv differs between 1 and 8 threads"
    );
    assert!(!serial.is_empty());
    println!(
        "PASS criterion 6: robots.csv byte-identical across thread counts ({} bytes)",
        serial.len()
    );
}

// ---------------------------------------------------------------------------
// criterion 7: invariant property suites, >= 10^4 random inputs each

#[test]
fn criterion_7a_genotype_validity_closed_under_variation() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut pool: Vec<_> = (0..64).map(|_| random_genotype(&mut rng)).collect();
    for i in 0..10_000 {
        let g = if i % 2 == 0 {
            mutate(&pool[i % pool.len()], &mut rng)
        } else {
            let a = rng.gen_range(0..pool.len());
            let b = rng.gen_range(0..pool.len());
            crossover(&pool[a], &pool[b], &mut rng)
        };
        g.validate()
            .unwrap_or_else(|e| panic!("iteration {i}: {e}"));
        let at = rng.gen_range(0..pool.len());
        pool[at] = g;
    }
    println!("PASS criterion 7a: 10^4 mutate/crossover applications keep genotypes valid");
}

#[test]
fn criterion_7b_decode_no_overlap_and_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let cfg = RewriteConfig::default();
    let limits = BodyLimits::default();
    for i in 0..10_000 {
        let g = random_genotype(&mut rng);
        let body = decode(&rewrite(&g, &cfg), limits).unwrap();
        let mut seen = std::collections::HashSet::new();
        for m in body.modules() {
            assert!(
                seen.insert(m.grid_pos),
                "iteration {i}: overlap at {:?}",
                m.grid_pos
            );
        }
        assert!(body.n_joints() <= limits.max_joints, "iteration {i}");
        assert!(body.n_bricks() <= limits.max_bricks, "iteration {i}");
    }
    println!("PASS criterion 7b: 10^4 decoded bodies have unique cells and respect limits");
}

#[test]
fn criterion_7c_simulation_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let rewrite_cfg = RewriteConfig::default();
    let limits = BodyLimits::default();
    for i in 0..10_000 {
        let g = random_genotype(&mut rng);
        let body = decode(&rewrite(&g, &rewrite_cfg), limits).unwrap();
        let n_steps = rng.gen_range(5..=40);
        let cfg = SimConfig {
            duration: n_steps as f64 * 0.05,
            c_start: [0.5, 2.0, 10.0][i % 3],
            ..SimConfig::default()
        };
        let (result, trace) = simulate_with_trace(&body, &cfg).unwrap();
        let mut prev = cfg.c_start;
        for row in &trace {
            assert!(row.delta_c >= 0.0, "iteration {i}: negative consumption");
            assert!(
                row.energy <= prev && (0.0..=cfg.c_start).contains(&row.energy),
                "iteration {i}: charge not monotone in [0, c_start]"
            );
            prev = row.energy;
        }
        assert!(result.speed >= 0.0, "iteration {i}");
        assert!((0.0..=1.0).contains(&result.balance), "iteration {i}");
        assert!(result.alive_steps <= n_steps, "iteration {i}");
        if body.n_joints() == 0 {
            assert_eq!(result.speed, 0.0, "iteration {i}");
            assert_eq!(result.battery_remaining, cfg.c_start, "iteration {i}");
            assert_eq!(result.balance, 1.0, "iteration {i}");
        }
    }
    println!("PASS criterion 7c: 10^4 simulations keep charge monotone in [0, c_start], speed >= 0, balance in [0, 1]");
}

#[test]
fn criterion_7d_crowding_boundaries_infinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    for i in 0..10_000 {
        let n = rng.gen_range(1..=32);
        let front: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let dists = crowding_distances(&front);
        assert!(
            dists.iter().all(|d| *d >= 0.0),
            "iteration {i}: negative distance"
        );
        for obj in [0usize, 1] {
            let hi = (0..n)
                .max_by(|&a, &b| front[a][obj].total_cmp(&front[b][obj]))
                .unwrap();
            let lo = (0..n)
                .min_by(|&a, &b| front[a][obj].total_cmp(&front[b][obj]))
                .unwrap();
            assert!(
                dists[hi].is_infinite(),
                "iteration {i}: max of objective {obj} finite"
            );
            assert!(
                dists[lo].is_infinite(),
                "iteration {i}: min of objective {obj} finite"
            );
        }
    }
    println!("PASS criterion 7d: 10^4 random fronts give boundary members infinite crowding");
}

// ---------------------------------------------------------------------------
// criterion 8: calibration procedure on stubbed measurements

#[test]
fn criterion_8_calibration_from_stub() {
    let charge = pressure_scaled_charge(&vec![12.0; 40]).unwrap();
    assert!((charge - 10.0).abs() <= 1e-9, "charge = {charge}");
    let doubled = pressure_scaled_charge(&[24.0]).unwrap();
    assert!((doubled - 20.0).abs() <= 1e-9);
    println!("PASS criterion 8: stubbed mean consumption 12.0 calibrates to charge {charge:.9}");
}

// ---------------------------------------------------------------------------
// supporting check: truncation elitism over random pools

#[test]
fn supporting_truncation_elitism() {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    for case in 0..1000 {
        let n = rng.gen_range(2..=48);
        let mu = rng.gen_range(1..=n);
        let objs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..2)
                    .map(|_| (rng.gen_range(0.0f64..1.0) * 8.0).floor() / 8.0)
                    .collect()
            })
            .collect();
        let fronts = oracle_fronts(&objs);
        let selected = morphevo::moea::nsga2_truncation(&objs, mu);
        assert_eq!(selected.len(), mu.min(n), "case {case}");
        let mut dedup = selected.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(
            dedup.len(),
            selected.len(),
            "case {case}: duplicate survivor"
        );
        if fronts[0].len() <= mu {
            // the whole non-dominated set must survive
            for &i in &fronts[0] {
                assert!(
                    selected.contains(&i),
                    "case {case}: front-0 member {i} dropped"
                );
            }
        }
        // fronts fill in order: selecting from front k implies all of the
        // earlier fronts were taken whole
        let rank_of = |i: usize| fronts.iter().position(|f| f.contains(&i)).unwrap();
        let deepest = selected.iter().copied().map(rank_of).max().unwrap();
        for front in fronts.iter().take(deepest) {
            for &i in front {
                assert!(
                    selected.contains(&i),
                    "case {case}: skipped ahead of member {i}"
                );
            }
        }
    }
}
