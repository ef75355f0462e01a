//! Seeded randomness.
//!
//! Every random quantity in the crate is a deterministic function of a
//! declared 64-bit seed. Streams are [`ChaCha8Rng`] instances; per-trial
//! seeds are derived from a master seed with the SplitMix64 finalizer so
//! that trials can be evaluated in any order (or in parallel) and still
//! reduce to the same totals.

use rand::RngCore;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as SimRng;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_for(master: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, index))
}

/// Inverse-CDF sampler over `0..k` using 64-bit fixed-point thresholds.
///
/// One `next_u64` per draw; zero-probability outcomes are never returned.
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    thresholds: Vec<u64>,
    last_positive: u8,
}

impl Categorical {
    pub fn new(pmf: &[f64]) -> Self {
        assert!(!pmf.is_empty() && pmf.len() <= 256);
        let total: f64 = pmf.iter().sum();
        let last_positive = pmf.iter().rposition(|&p| p > 0.0).expect("pmf has positive mass") as u8;
        let scale = 18_446_744_073_709_551_616.0_f64; // 2^64
        let mut acc = 0.0;
        let thresholds = pmf
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                acc += p / total;
                if i >= last_positive as usize {
                    u64::MAX
                } else if p <= 0.0 && i == 0 {
                    0
                } else {
                    // f64 -> u64 casts saturate
                    (acc * scale) as u64
                }
            })
            .collect();
        Self { thresholds, last_positive }
    }

    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u8 {
        let u = rng.next_u64();
        match self.thresholds.len() {
            2 => (u >= self.thresholds[0]) as u8 & self.last_positive,
            _ => self
                .thresholds
                .iter()
                .position(|&t| u < t)
                .map_or(self.last_positive, |i| i as u8),
        }
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_and_are_stable() {
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
        assert_ne!(derive_seed(7, 3), derive_seed(7, 4));
        assert_ne!(derive_seed(7, 3), derive_seed(8, 3));
    }

    #[test]
    fn categorical_frequencies() {
        let cat = Categorical::new(&[0.2, 0.0, 0.5, 0.3]);
        let mut rng = SimRng::seed_from_u64(1);
        let mut counts = [0usize; 4];
        let draws = 200_000;
        for _ in 0..draws {
            counts[cat.sample(&mut rng) as usize] += 1;
        }
        assert_eq!(counts[1], 0);
        for (c, p) in counts.iter().zip([0.2, 0.0, 0.5, 0.3]) {
            assert!((*c as f64 / draws as f64 - p).abs() < 0.005);
        }
    }

    #[test]
    fn trailing_zero_probability_never_drawn() {
        let cat = Categorical::new(&[0.4, 0.6, 0.0]);
        let mut rng = SimRng::seed_from_u64(2);
        assert!((0..10_000).all(|_| cat.sample(&mut rng) < 2));
    }

    #[test]
    fn binary_fast_path_matches_bernoulli() {
        let cat = Categorical::new(&[0.7, 0.3]);
        let mut rng = SimRng::seed_from_u64(3);
        let ones: usize = (0..100_000).map(|_| cat.sample(&mut rng) as usize).sum();
        assert!((ones as f64 / 1e5 - 0.3).abs() < 0.005);
    }
}
