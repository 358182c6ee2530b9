//! Counter-based 64-bit generator.
//!
//! Output `i` of stream `key` is `mix64(key + (i + 1)·γ)` with the SplitMix64
//! increment `γ = 0x9e3779b97f4a7c15` and finalizer (Stafford's variant 13).
//! Every output is a pure function of `(key, i)`, so a stream can be started
//! at any counter and independent streams are derived by choosing keys.
//! Streams for trial blocks use `key = seed ⊕ mix64(block + BLOCK_SALT)`.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const BLOCK_SALT: u64 = 0x6a09_e667_f3bc_c909;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        CounterRng { key, counter: 0 }
    }

    /// Stream for trial block `block` under a run seed.
    pub fn for_block(seed: u64, block: u64) -> Self {
        CounterRng::new(seed ^ mix64(block.wrapping_add(BLOCK_SALT)))
    }

    /// Output number `i` of this stream, without advancing.
    #[inline]
    pub fn at(&self, i: u64) -> u64 {
        mix64(self.key.wrapping_add(i.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-and-reject, unbiased).
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut prod = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = prod as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                prod = u128::from(self.next_u64()) * u128::from(bound);
                low = prod as u64;
            }
        }
        (prod >> 64) as u64
    }
}
