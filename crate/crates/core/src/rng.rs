//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha20 keystream keyed by the master seed, with the
//! stream index selecting the ChaCha nonce. Two streams with the same
//! `(master_seed, stream_index)` are identical; different indices select
//! disjoint keystreams, so work can be split across threads in any order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha20Rng,
}

/// Derive the substream `stream_index` of `master_seed`.
pub fn derive_stream(master_seed: u64, stream_index: u64) -> RngStream {
    let mut inner = ChaCha20Rng::seed_from_u64(master_seed);
    inner.set_stream(stream_index);
    RngStream {
        master_seed,
        stream_index,
        inner,
    }
}

/// Deterministically mixes a seed with a salt, for deriving child master seeds
/// (one per repeat or replicate) from a user-facing seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
