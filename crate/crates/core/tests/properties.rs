//! Property tests over randomly generated genotypes, bodies, fronts and
//! summary tables.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphevo::body::{decode, descriptors, BodyLimits};
use morphevo::lsystem::{crossover, mutate, random_genotype, rewrite, Genotype, RewriteConfig};
use morphevo::moea::dominates;
use morphevo::report::RobotRow;
use morphevo::sim::{balance_of, simulate, speed_of, SimConfig};
use morphevo::stats::{aggregate_generation, extract_pareto, welch_t, SummaryStats};

fn genotype_from_seed(seed: u64) -> Genotype {
    random_genotype(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn rewrite_is_deterministic_and_single_core(seed in any::<u64>(), iters in 0u32..5) {
        let g = genotype_from_seed(seed);
        let cfg = RewriteConfig { iterations: iters, max_string_length: 500 };
        let a = rewrite(&g, &cfg);
        let b = rewrite(&g, &cfg);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.iter().filter(|t| t.is_core()).count(), 1);
        prop_assert!(a.len() <= 500);
    }

    #[test]
    fn variation_preserves_validity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_genotype(&mut rng);
        let b = random_genotype(&mut rng);
        prop_assert!(mutate(&a, &mut rng).validate().is_ok());
        prop_assert!(crossover(&a, &b, &mut rng).validate().is_ok());
    }

    #[test]
    fn crossover_introduces_no_new_tokens(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_genotype(&mut rng);
        let b = random_genotype(&mut rng);
        let child = crossover(&a, &b, &mut rng);
        for (i, rule) in child.rules().iter().enumerate() {
            prop_assert!(
                rule.replacement == a.rules()[i].replacement
                    || rule.replacement == b.rules()[i].replacement
            );
        }
    }

    #[test]
    fn genotype_text_round_trips(seed in any::<u64>()) {
        let g = genotype_from_seed(seed);
        let parsed: Genotype = g.to_string().parse().unwrap();
        prop_assert_eq!(parsed, g);
    }

    #[test]
    fn decoded_bodies_are_trees(seed in any::<u64>()) {
        let g = genotype_from_seed(seed);
        let body = decode(&rewrite(&g, &RewriteConfig::default()), BodyLimits::default()).unwrap();
        // one core, every module reachable from it, edges = modules - 1
        prop_assert!(body.core().attachment.is_none());
        prop_assert_eq!(body.descendants(0).len(), body.len() - 1);
        let edges = body.modules().iter().filter(|m| m.attachment.is_some()).count();
        prop_assert_eq!(edges, body.len() - 1);
        let d = descriptors(&body);
        prop_assert_eq!(d.size, d.n_joints + d.n_bricks + 1);
        prop_assert!(d.proportion > 0.0 && d.proportion <= 1.0);
    }

    #[test]
    fn simulation_outputs_stay_in_range(seed in any::<u64>()) {
        let g = genotype_from_seed(seed);
        let body = decode(&rewrite(&g, &RewriteConfig::default()), BodyLimits::default()).unwrap();
        let cfg = SimConfig { duration: 1.0, ..SimConfig::default() };
        let r = simulate(&body, &cfg).unwrap();
        prop_assert!(r.speed >= 0.0);
        prop_assert!((0.0..=1.0).contains(&r.balance));
        prop_assert!((0.0..=cfg.c_start).contains(&r.battery_remaining));
        prop_assert!(r.alive_steps >= 1 && r.alive_steps <= 20);
    }

    #[test]
    fn speed_and_balance_helpers_are_bounded(
        x in -100.0f64..100.0,
        y in -100.0f64..100.0,
        duration in 0.001f64..1000.0,
        omegas in prop::collection::vec(-50.0f64..50.0, 1..64),
        omega_ref in 0.01f64..100.0,
    ) {
        prop_assert!(speed_of((0.0, 0.0), (x, y), duration).unwrap() >= 0.0);
        let b = balance_of(&omegas, omega_ref).unwrap();
        prop_assert!((0.0..=1.0).contains(&b));
    }

    #[test]
    fn quartiles_are_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let (median, q1, q3) = aggregate_generation(&values).unwrap();
        prop_assert!(q1 <= median && median <= q3);
    }

    #[test]
    fn welch_is_antisymmetric(
        mean_a in -100.0f64..100.0, sd_a in 0.01f64..50.0, n_a in 2usize..500,
        mean_b in -100.0f64..100.0, sd_b in 0.01f64..50.0, n_b in 2usize..500,
    ) {
        let a = SummaryStats::new(n_a, mean_a, sd_a);
        let b = SummaryStats::new(n_b, mean_b, sd_b);
        let ab = welch_t(&a, &b).unwrap();
        let ba = welch_t(&b, &a).unwrap();
        prop_assert_eq!(ab.t, -ba.t);
        prop_assert_eq!(ab.df, ba.df);
        prop_assert_eq!(ab.p_two_sided, ba.p_two_sided);
        prop_assert!((0.0..=1.0).contains(&ab.p_two_sided));
    }

    #[test]
    fn pareto_flags_match_brute_force(
        points in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..256),
    ) {
        let rows: Vec<RobotRow> = points
            .iter()
            .enumerate()
            .map(|(i, &(speed, battery))| RobotRow {
                experiment: "battery".into(),
                run: 0,
                generation: 1,
                robot_id: i as u32,
                n_modules: 1,
                n_bricks: 0,
                n_joints: 0,
                branching: 0,
                proportion: 1.0,
                speed_cms: speed,
                battery_remaining: battery,
                balance: 1.0,
                alive_steps: 1,
                genotype: String::new(),
            })
            .collect();
        let flags = extract_pareto(&rows).unwrap();
        for (i, &(s, b)) in points.iter().enumerate() {
            let brute = !points
                .iter()
                .any(|&(os, ob)| dominates(&[os, ob], &[s, b]));
            prop_assert_eq!(flags[i], brute, "row {}", i);
        }
    }
}
