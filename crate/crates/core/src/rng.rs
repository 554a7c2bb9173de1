//! Seeded random streams.
//!
//! Every random concern draws from its own ChaCha8 stream keyed by the
//! master seed, so re-running one layer never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent consumers of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    NodePositions,
    TaskCounts,
    Genetic,
    Sampling,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::NodePositions => 1,
            Stream::TaskCounts => 2,
            Stream::Genetic => 3,
            Stream::Sampling => 4,
        }
    }
}

/// Deterministic generator for `(seed, stream)`.
pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

/// Sub-stream for an indexed job (sweep cell, HAO iteration, ...).
pub fn substream(seed: u64, which: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, which);
    rng.set_word_pos(u128::from(index) << 64);
    rng
}
