//! Deterministic pseudo-randomness.
//!
//! All seeded behaviour in this crate is defined in terms of the
//! SplitMix64 generator (Steele, Lea & Flood, "Fast splittable
//! pseudorandom number generators", OOPSLA 2014; the constants below are
//! the widely used reference ones). The generator is pure 64-bit integer
//! arithmetic, so a given seed yields the same stream on every platform
//! and toolchain. Shuffling uses the modern Fisher-Yates walk from the
//! back of the slice with debiased bounded draws.

/// SplitMix64 stream. One `next_u64` call advances the state by the odd
/// constant 0x9E3779B97F4A7C15 and returns the mixed output.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1): the top 53 bits of `next_u64` scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in [0, bound) via rejection of the biased tail of the
    /// modulo reduction. `bound` must be nonzero.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// In-place Fisher-Yates shuffle: for i from len-1 down to 1, swap
    /// element i with a uniform index in [0, i].
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            slice.swap(i, j);
        }
    }
}
