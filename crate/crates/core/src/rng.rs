//! Seed derivation. Every random stream is keyed by a master seed plus a
//! path of integers, so results never depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers mixed into derived seeds.
pub mod stream {
    pub const POOL: u64 = 1;
    pub const SCATTERERS: u64 = 2;
    pub const DROP: u64 = 3;
    pub const NOISE: u64 = 4;
    pub const ORIENTATION: u64 = 5;
    pub const RANDOM_CQI: u64 = 6;
    pub const TREE: u64 = 7;
    pub const SPLIT: u64 = 8;
}

/// One step of the splitmix64 sequence.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `path` into `seed`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn derive_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_separate_streams() {
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2]), derive_seed(2, &[2]));
        assert_eq!(derive_seed(9, &[4, 5]), derive_seed(9, &[4, 5]));
    }
}
