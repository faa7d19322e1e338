//! Per-instantiation random streams.
//!
//! Instantiation `i` of a run with seed `s` draws from ChaCha8 seeded with
//! `seed_from_u64(s)` on stream `i`. Streams never overlap, so any worker
//! can produce instantiation `i` and serial and parallel runs agree.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
