//! Named random streams derived from one 64-bit seed.
//!
//! Every consumer asks for its own ChaCha stream, keyed by a label (and
//! optionally an index). ChaCha is counter based, so streams with distinct
//! keys never overlap and draws in one module cannot shift another's.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream `label` of `seed`.
pub fn stream(seed: u64, label: &str) -> Rng {
    substream(seed, label, 0)
}

/// Stream `(label, index)` of `seed`, e.g. one per episode or per worker.
pub fn substream(seed: u64, label: &str, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label.as_bytes(), index));
    rng
}

fn fnv1a(bytes: &[u8], index: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &b in bytes.iter().chain(&[0xff]).chain(&index.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}
