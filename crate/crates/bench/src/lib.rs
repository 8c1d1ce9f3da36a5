//! Shared fixtures for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphevo::body::{decode, BodyGraph, BodyLimits};
use morphevo::lsystem::{random_genotype, rewrite, Genotype, RewriteConfig};

/// Deterministic batch of genotypes.
pub fn genotypes(n: usize, seed: u64) -> Vec<Genotype> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_genotype(&mut rng)).collect()
}

/// A moving multi-joint body used by the simulation benchmarks.
pub fn sample_body() -> BodyGraph {
    let text = "C -> C J(0.90,1.50,0.00) B [ l J(0.70,2.50,0.50) ]\n\
                B -> B J(0.50,2.00,0.25) B\n\
                J -> J(1.00,3.00,0.10) B";
    let genotype: Genotype = text.parse().unwrap();
    decode(
        &rewrite(&genotype, &RewriteConfig::default()),
        BodyLimits::default(),
    )
    .unwrap()
}

/// Random bi-objective points for the sorting benchmarks.
pub fn objective_points(n: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
        .collect()
}
