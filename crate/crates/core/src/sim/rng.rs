use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Seeded SplitMix64 stream (Steele, Lea & Flood; increment
/// 0x9E3779B97F4A7C15, output mixers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB) with draw helpers that are simple enough to port
/// verbatim to another language.
#[derive(Debug, Clone)]
pub struct FixtureRng(SplitMix64);

impl FixtureRng {
    pub fn new(seed: u64) -> Self {
        FixtureRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1) from the top 53 bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by rejection, `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        lo + self.below(hi - lo + 1)
    }

    /// Uniform real in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}
