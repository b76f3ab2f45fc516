//! Seeded randomness.
//!
//! All randomized code draws from [`RunRng`], ChaCha8 keyed by a 64-bit seed.
//! ChaCha is counter based, so streams are identical on every platform and
//! individual words can be addressed directly (see
//! [`crate::influence::RealizationSet`]).
//!
//! Child seeds are derived with [`derive_seed`]: starting from `mix(master)`,
//! each part `p` is folded in as `h = mix(h ^ mix(p))`, where `mix` is the
//! SplitMix64 finalizer. A sweep uses `derive_seed(master, &[value, rep])`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RunRng = ChaCha8Rng;

/// Stream tags used to split one run seed into independent purposes.
pub mod stream {
    pub const INSTANCE: u64 = 1;
    pub const REALIZATIONS: u64 = 2;
    pub const ALGORITHM: u64 = 3;
}

/// SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(master), |h, &p| mix(h ^ mix(p)))
}

pub fn rng_from_seed(seed: u64) -> RunRng {
    RunRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derivation_is_stable_and_order_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(derive_seed(7, &[1]), derive_seed(8, &[1]));
        // frozen so external reimplementations can check their streams
        assert_eq!(mix(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = rng_from_seed(42)
            .sample_iter(rand::distributions::Standard)
            .take(4)
            .collect();
        let b: Vec<u64> = rng_from_seed(42)
            .sample_iter(rand::distributions::Standard)
            .take(4)
            .collect();
        assert_eq!(a, b);
    }
}
