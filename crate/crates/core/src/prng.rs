//! Deterministic counter-based randomness.
//!
//! Output number i for seed s is `mix64(s + (i+1) * GOLDEN)` where `mix64`
//! is the SplitMix64 finalizer and GOLDEN is 2^64 / phi. Every output is a
//! pure function of (seed, counter), so results do not depend on call order,
//! platform, or thread count; this is the reproducibility contract the rest
//! of the crate relies on.
//!
//! Digits in [0, p) are drawn by rejection sampling: a raw 64-bit value is
//! discarded unless it falls below the largest multiple of p that fits in
//! 2^64, which makes the reduced value exactly uniform.
//!
//! Parallel work splits streams with [`CounterRng::with_stream`]; the
//! derivation (double mix of seed and stream index) is part of the output
//! contract, since changing it would change every sampled word.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on u64.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator: state is just (seed, counter).
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0 }
    }

    /// Generator for parallel stream `stream` of the run seeded by `seed`.
    /// Distinct stream indices give decorrelated seeds.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        CounterRng::new(mix64(mix64(seed ^ GOLDEN) ^ stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform draw from [0, bound) by rejection; `bound >= 1`.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        // Largest v such that [0, v] has a multiple-of-bound length.
        let top = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let v = self.next_u64();
            if v <= top {
                return v % bound;
            }
        }
    }
}
