//! Named random substreams.
//!
//! Every consumer of randomness draws from its own ChaCha8 stream keyed by
//! the SHA-256 digest of `(seed, purpose tag)`. Two tags never share a key,
//! so extra draws in one stream cannot shift another. The mappings from raw
//! `u64` words to floats, bounded integers and permutations are defined here
//! instead of being borrowed from `rand`, which keeps pinned outputs stable
//! across dependency upgrades and platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

/// Derives the 32-byte ChaCha key for `(seed, tag)`.
pub fn substream_key(seed: u64, tag: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(b"archsynth/substream/v1\0");
    hasher.update(seed.to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.finalize().into()
}

#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, tag: &str) -> Self {
        Self::from_key(substream_key(seed, tag), 0)
    }

    /// Stream number `index` under an already derived key. Used for
    /// per-pixel streams, where hashing once per pixel would dominate.
    pub fn from_key(key: [u8; 32], index: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`; returns `lo` exactly when the interval is collapsed.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.unit();
        if lo == hi {
            lo
        } else {
            lo + (hi - lo) * u
        }
    }

    /// Uniform draw snapped to the 1e-6 grid and kept inside `[lo, hi]`.
    pub fn uniform_q6(&mut self, lo: f64, hi: f64) -> f64 {
        let x = self.uniform(lo, hi);
        quantize_within(x, lo, hi)
    }

    /// Uniform integer in `[lo, hi]` by rejection sampling (no modulo bias).
    pub fn int_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        let span = u64::from(hi - lo) + 1;
        let zone = u64::MAX - (u64::MAX % span);
        loop {
            let x = self.next_u64();
            if x < zone {
                return lo + (x % span) as u32;
            }
        }
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Fisher-Yates shuffle driven by [`Stream::int_inclusive`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.int_inclusive(0, i as u32) as usize;
            items.swap(i, j);
        }
    }
}

/// Rounds to six decimal places, normalizing `-0.0` to `0.0`.
pub fn q6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6 + 0.0
}

/// [`q6`], nudged by one grid step when rounding would leave `[lo, hi]`.
pub fn quantize_within(x: f64, lo: f64, hi: f64) -> f64 {
    let q = q6(x);
    if q > hi {
        let down = q6(q - 1e-6);
        if down >= lo {
            return down;
        }
    } else if q < lo {
        let up = q6(q + 1e-6);
        if up <= hi {
            return up;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_tag_repeat() {
        let a: Vec<u64> = {
            let mut s = Stream::new(42, "room");
            (0..8).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = Stream::new(42, "room");
            (0..8).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn tags_and_seeds_separate_streams() {
        let first = |seed, tag| Stream::new(seed, tag).next_u64();
        assert_ne!(first(42, "room"), first(42, "camera"));
        assert_ne!(first(42, "room"), first(43, "room"));
        let key = substream_key(1, "photo");
        assert_ne!(
            Stream::from_key(key, 0).next_u64(),
            Stream::from_key(key, 1).next_u64()
        );
    }

    // Expected words come from a standalone ChaCha8 run over the SHA-256 key.
    // Changes here break every golden downstream.
    #[test]
    fn pinned_first_draw() {
        assert_eq!(
            hex::encode(substream_key(0, "room")),
            "9cb2859d7527f1c367a2dd656ad55c1a48e1edb4617d3fc96cdf4b0f33526966"
        );
        let mut s = Stream::new(0, "room");
        assert_eq!(s.next_u64(), 0xa90c_956d_54fe_3334);
        assert_eq!(s.next_u64(), 0x4696_e0c5_a7e1_9ebc);
        let mut p = Stream::from_key(substream_key(7, "photo"), 5);
        assert_eq!(p.next_u64(), 0x220b_f48d_1927_1cd8);
    }

    #[test]
    fn unit_and_int_ranges() {
        let mut s = Stream::new(7, "t");
        for _ in 0..10_000 {
            let u = s.unit();
            assert!((0.0..1.0).contains(&u));
            let k = s.int_inclusive(3, 10);
            assert!((3..=10).contains(&k));
        }
        assert_eq!(s.int_inclusive(5, 5), 5);
        assert_eq!(s.uniform(2.5, 2.5), 2.5);
    }

    #[test]
    fn int_inclusive_hits_both_ends() {
        let mut s = Stream::new(9, "ends");
        let draws: Vec<u32> = (0..1000).map(|_| s.int_inclusive(1, 4)).collect();
        assert!(draws.contains(&1) && draws.contains(&4));
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut s = Stream::new(3, "split");
        let mut v: Vec<u32> = (0..100).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }

    #[test]
    fn q6_snaps_and_stays_inside() {
        assert_eq!(q6(1.23456789), 1.234568);
        assert!(q6(-1e-9).is_sign_positive());
        let mut s = Stream::new(11, "q");
        for _ in 0..10_000 {
            let x = s.uniform_q6(0.5, 7.5);
            assert!((0.5..=7.5).contains(&x));
            assert_eq!(q6(x), x);
        }
    }
}
