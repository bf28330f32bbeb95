//! Deterministic random number generation.
//!
//! All sampling runs on ChaCha8, a counter-based generator, seeded through a
//! documented SplitMix64 mix of `(seed, stream)`. Two draws agree across
//! machines, thread counts and runs whenever `(seed, stream)` agree, which is
//! what makes benchmark CSVs byte-reproducible.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Generator identifier recorded in benchmark metadata.
pub const RNG_NAME: &str = "chacha8/splitmix64-substream";

/// SplitMix64 output function; also the basis of sub-stream derivation.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `stream` from a base seed.
pub fn substream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0xA076_1D64_78BD_642F).wrapping_add(1)))
}

/// FNV-1a 64-bit hash over the given byte chunks.
///
/// Benchmark trials derive their seeds as
/// `fnv1a64(base_seed_le || experiment_id || 0x1f || method || 0x1f || trial_le)`;
/// the constant is part of the output contract and must not change.
pub fn fnv1a64(chunks: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for chunk in chunks {
        for &b in *chunk {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Per-trial seed used by the benchmark harness.
pub fn derive_trial_seed(base_seed: u64, experiment_id: &str, method: &str, trial: u64) -> u64 {
    fnv1a64(&[
        &base_seed.to_le_bytes(),
        experiment_id.as_bytes(),
        &[0x1f],
        method.as_bytes(),
        &[0x1f],
        &trial.to_le_bytes(),
    ])
}

/// Deterministic generator over a `(seed, stream)` pair.
pub struct DetRng {
    inner: ChaCha8Rng,
}

impl DetRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(substream_seed(seed, stream)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on the open interval (0, 1).
    ///
    /// Takes the top 53 bits and centers them, so 0 and 1 are never produced
    /// and inverse-CDF transforms stay finite.
    pub fn uniform_open01(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_disjoint() {
        let mut a = DetRng::new(7, 0);
        let mut b = DetRng::new(7, 0);
        let mut c = DetRng::new(7, 1);
        let xs: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let zs: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn uniform_stays_strictly_inside_unit_interval() {
        let mut rng = DetRng::new(123, 0);
        for _ in 0..10_000 {
            let u = rng.uniform_open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn fnv_matches_reference_values() {
        // FNV-1a test vectors: empty input and "a"
        assert_eq!(fnv1a64(&[b""]), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(&[b"a"]), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn trial_seeds_differ_by_every_component() {
        let s = derive_trial_seed(1, "exp", "empirical", 0);
        assert_ne!(s, derive_trial_seed(2, "exp", "empirical", 0));
        assert_ne!(s, derive_trial_seed(1, "exp2", "empirical", 0));
        assert_ne!(s, derive_trial_seed(1, "exp", "mom", 0));
        assert_ne!(s, derive_trial_seed(1, "exp", "empirical", 1));
    }
}
