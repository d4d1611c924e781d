//! Seeded random streams.
//!
//! Every parallel task draws from its own ChaCha stream selected by a task
//! index, so results do not depend on thread count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Rng = ChaCha20Rng;

/// Generator for task `stream` under the run seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
