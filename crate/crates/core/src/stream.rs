//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream, position)`: the 64-bit
//! seed and stream id are embedded verbatim into a ChaCha8 key, so distinct
//! pairs get distinct keys and a path can be replayed or extended without
//! touching any other stream. Workers never share generator state, which is
//! what makes the harness reductions deterministic under any thread count.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// One reproducible stream of the `(seed, stream)`-keyed generator family.
#[derive(Debug, Clone)]
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&stream.to_le_bytes());
        StreamRng {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Batched fair-sign source: one `u64` draw yields 64 Rademacher signs.
#[derive(Debug, Clone)]
pub struct SignSource {
    rng: StreamRng,
    buf: u64,
    left: u32,
}

impl SignSource {
    pub fn new(rng: StreamRng) -> Self {
        SignSource { rng, buf: 0, left: 0 }
    }

    #[inline]
    pub fn next_sign(&mut self) -> f64 {
        if self.left == 0 {
            self.buf = self.rng.next_u64();
            self.left = 64;
        }
        let bit = self.buf & 1;
        self.buf >>= 1;
        self.left -= 1;
        (2.0 * bit as f64) - 1.0
    }

    /// `count <= 32` raw bits packed little-endian.
    pub fn next_bits(&mut self, count: u32) -> u32 {
        debug_assert!(count <= 32);
        let mut out = 0u32;
        for i in 0..count {
            if self.left == 0 {
                self.buf = self.rng.next_u64();
                self.left = 64;
            }
            out |= ((self.buf & 1) as u32) << i;
            self.buf >>= 1;
            self.left -= 1;
        }
        out
    }
}
