//! Reproducible random streams.
//!
//! Every replication of an experiment draws from its own ChaCha8 stream,
//! addressed by `(seed, stream_id)`. ChaCha exposes 2^64 independent
//! streams per key, so replications never share randomness and the output
//! of a run does not depend on how replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Materializes the generator. Two calls with the same stream give the
    /// same sequence of draws.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
