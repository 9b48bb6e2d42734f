//! Counter-based pseudo-random streams.
//!
//! Every stream is identified by a 64-bit key. The `k`-th output of a stream
//! is `mix(key + (k + 1) * GAMMA)`, where `mix` is the SplitMix64 finalizer:
//!
//! ```text
//! GAMMA = 0x9E3779B97F4A7C15
//! mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!         z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!         return z ^ (z >> 31)            (all arithmetic mod 2^64)
//! ```
//!
//! Stream keys are derived from a master seed and a list of indices by
//! `key = mix(seed ^ 0x5DEECE66D)` followed by `key = mix(key ^ mix(index + GAMMA))`
//! for each index in turn. Uniform doubles take the top 53 bits:
//! `u = (next >> 11) * 2^-53`, so `u` lies in `[0, 1)`.
//!
//! The construction is fully specified here so the same streams can be
//! reproduced from any language.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a stream key from a master seed and a path of indices.
pub fn derive_key(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(seed ^ 0x5_DEEC_E66D), |key, &i| {
        mix64(key ^ mix64(i.wrapping_add(GAMMA)))
    })
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_path(seed: u64, path: &[u64]) -> Self {
        Self::new(derive_key(seed, path))
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// Number of outputs drawn so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi]` (the upper end is reachable only through rounding).
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Uniform integer in `[0, n)` by rejection, so there is no modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // SplitMix64 seeded with 0 produces these as its first two outputs.
        let mut rng = CounterRng::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn streams_are_independent_of_draw_order() {
        let a: Vec<u64> = {
            let mut r = CounterRng::from_path(7, &[3]);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let _ = CounterRng::from_path(7, &[2]).next_u64();
        let mut r = CounterRng::from_path(7, &[3]);
        let b: Vec<u64> = (0..4).map(|_| r.next_u64()).collect();
        assert_eq!(a, b);
        assert_ne!(derive_key(7, &[3]), derive_key(7, &[4]));
        assert_ne!(derive_key(7, &[3, 0]), derive_key(7, &[3, 1]));
    }

    #[test]
    fn unit_interval_bounds() {
        let mut r = CounterRng::new(99);
        for _ in 0..10_000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut v: Vec<usize> = (0..100).collect();
        CounterRng::new(5).shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
