//! Counter-based random streams.
//!
//! A stream is a `(seed, counter)` pair. Draw `i` is a pure function of
//! `(seed, i)`, so results never depend on thread scheduling and a stream can
//! be forked into independent children by mixing an id into the seed.

use rand_core::{impls, RngCore};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn at(seed: u64, counter: u64) -> Self {
        Self { seed, counter }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Independent child stream identified by `id`; the parent is not advanced.
    pub fn fork(&self, id: u64) -> Self {
        Self::new(mix64(self.seed ^ mix64(id.wrapping_add(GOLDEN_GAMMA))))
    }

    pub fn next_bits(&mut self) -> u64 {
        let v = mix64(
            self.seed
                .wrapping_add(self.counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        );
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_bits() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`; returns `lo` when `lo == hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo <= hi) {
            return Err(invalid(format!("uniform: lo {lo} > hi {hi}")));
        }
        let u = self.next_f64();
        if lo == hi {
            return Ok(lo);
        }
        Ok((lo + (hi - lo) * u).min(hi.next_down().max(lo)))
    }

    /// Uniform integer in `[lo, hi]` (inclusive).
    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        // multiply-shift reduction; bias is below 2^-40 for the spans used here
        let r = ((self.next_bits() as u128 * span as u128) >> 64) as u64;
        lo + r as i64
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    pub fn gaussian(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_bits() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_bits()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        impls::fill_bytes_via_next(self, dest)
    }
}
