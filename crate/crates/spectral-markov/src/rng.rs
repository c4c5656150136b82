//! Seeded random number streams.
//!
//! All randomness in the crate flows through [`stream_rng`]: a ChaCha12
//! generator keyed by a base seed, with one independent stream per Monte
//! Carlo worker. Results are reproducible bit-for-bit regardless of thread
//! scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator for worker `stream` under `base_seed`.
pub fn stream_rng(base_seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    rng
}
