//! Reproducible random streams keyed by `(seed, stream)`.
//!
//! Every random draw in the crate comes from a ChaCha8 generator seeded from
//! a 64-bit master seed with a separate stream per logical key, so results
//! do not depend on scheduling or on how many other draws were made.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream tags separating independent uses of one master seed.
pub mod tag {
    pub const DATA: u64 = 1;
    pub const SKETCH: u64 = 2;
    pub const SOLVER: u64 = 3;
    pub const VECTORS: u64 = 4;
}

/// A generator for one `(seed, stream)` key.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A child seed for `(master, tag, index)`. Child seeds for different
/// indices are read from disjoint positions of the same keystream.
pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    let mut rng = stream_rng(master, tag);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}
