//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream whose key is derived from
//! `(seed, substream_label)` and whose 64-bit stream id is the replicate
//! index. Streams never depend on how many draws other streams have made,
//! so replicates can run in any order on any number of threads.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    replicate_index: u64,
    substream_label: u32,
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64, replicate_index: u64, substream_label: u32) -> Self {
        let mut state = seed ^ u64::from(substream_label).wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(replicate_index);
        Self {
            seed,
            replicate_index,
            substream_label,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replicate_index(&self) -> u64 {
        self.replicate_index
    }

    pub fn substream_label(&self) -> u32 {
        self.substream_label
    }

    /// Stream for a sub-component of this one, same replicate index.
    pub fn child(&self, local: u32) -> Self {
        Self::new(
            self.seed,
            self.replicate_index,
            self.substream_label.wrapping_mul(0x1_0000).wrapping_add(local),
        )
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn open_unit(&mut self) -> f64 {
        // 53 random bits, offset by half an ulp so neither endpoint occurs.
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RandomStream {
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
