//! Deterministic random-stream derivation.
//!
//! Every stochastic decision in a run draws from a ChaCha stream keyed by
//! (master seed, repetition, purpose, payload), so results do not depend on
//! evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose of a derived stream.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    /// Initial-population genotype `index`.
    Init { index: u32 },
    /// All variation decisions for offspring `index` of generation `gen`.
    Offspring { gen: u32, index: u32 },
    /// Survivor-tournament draws for generation `gen`.
    Survivors { gen: u32 },
    /// Calibration sample `index`.
    Calibration { index: u32 },
}

impl Stream {
    fn encode(self) -> (u64, u64) {
        match self {
            Stream::Init { index } => (0, index as u64),
            Stream::Offspring { gen, index } => (1, ((gen as u64) << 32) | index as u64),
            Stream::Survivors { gen } => (2, gen as u64),
            Stream::Calibration { index } => (3, index as u64),
        }
    }
}

/// Derives an independent generator for one decision point.
pub fn rng_for(master_seed: u64, repetition: u32, stream: Stream) -> ChaCha8Rng {
    let (tag, payload) = stream.encode();
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&(repetition as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&tag.to_le_bytes());
    seed[24..32].copy_from_slice(&payload.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}
