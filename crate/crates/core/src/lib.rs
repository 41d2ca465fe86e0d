//! Intrinsic-dimension gating for tabular optimization problems, with the
//! budgeted optimizers, ranking, statistics and experiment rig around it.

pub mod bayes;
pub mod error;
pub mod intrinsic;
pub mod metrics;
pub mod optim;
pub mod rank;
pub mod rig;
pub mod stats;
pub mod table;

pub use error::{Error, Result};

use rand::SeedableRng;

/// The generator every seeded component draws from.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
