//! Deterministic random substreams.
//!
//! A run is driven by one 64-bit master seed. Every consumer of randomness
//! gets its own ChaCha8 stream derived from that seed, so reordering one
//! consumer (or skipping its draws entirely when noise is off) never shifts
//! the draws seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named consumers of randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Initial example permutation.
    Shuffle,
    /// Mini-batch sampling.
    Batch,
    /// Noise on the model vector (alpha for dual solvers, theta for primal).
    ModelNoise,
    /// Noise on the auxiliary vector (and on the DP-SGD gradient).
    AuxNoise,
    /// Train/validation/test partitioning.
    Split,
    /// Synthetic data generation.
    Synthetic,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Shuffle => 1,
            Stream::Batch => 2,
            Stream::ModelNoise => 3,
            Stream::AuxNoise => 4,
            Stream::Split => 5,
            Stream::Synthetic => 6,
        }
    }
}

pub fn substream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
