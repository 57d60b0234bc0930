//! Seeded randomness.
//!
//! All randomness flows through ChaCha8, a counter-based generator, keyed by
//! a 64-bit seed and a stream id so independent uses of one seed never
//! overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the distinct random quantities drawn from one seed.
pub mod stream {
    pub const DIAGONAL: u64 = 0;
    pub const NOISE: u64 = 1;
    pub const SIGNAL: u64 = 2;
    pub const SUBSET: u64 = 3;
    pub const PILOT: u64 = 4;
    pub const SUPPORTS: u64 = 5;
    pub const MATRIX: u64 = 6;
}

pub fn seeded(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}
