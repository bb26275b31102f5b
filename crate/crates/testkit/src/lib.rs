//! Shared test support: seeded generators for fields, diagrams and BDTs,
//! planted ensembles with known bases, and slow reference implementations
//! used as oracles.

pub mod fixtures;
pub mod gen;
pub mod oracle;
pub mod planted;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
