//! Deterministic per-stream random generators.
//!
//! Every ensemble member or parameter cell draws from its own ChaCha stream
//! derived from `(seed, stream id)`, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type LabRng = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> LabRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stream id for `(tag, index)` pairs, e.g. `(N, member)`.
pub fn stream_id(tag: u64, index: u64) -> u64 {
    tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index
}
