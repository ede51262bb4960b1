//! Counter-based derivation of independent random streams.
//!
//! Every stream is addressed by a base seed plus a path of integer labels
//! (run index, arm id, trial block, ...). The path is folded through a
//! SplitMix64 finalizer, so a stream's draws depend only on its address and
//! never on how many numbers other streams have consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator behind every stream.
pub type Stream = ChaCha8Rng;

/// Labels separating the purposes that share a base seed.
pub mod domain {
    pub const POLICY_RUN: u64 = 0x5155_4152;
    pub const OS_ORACLE: u64 = 0x4f53_4f52;
    pub const OS_TRIALS: u64 = 0x4f53_5452;
    pub const QUANTILE_TRIALS: u64 = 0x5154_5452;
    pub const BIAS_ORACLE: u64 = 0x4249_4153;
    pub const SPACING: u64 = 0x5350_4143;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold a label path into a 64-bit stream key.
pub fn derive_key(base_seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base_seed), |acc, &label| {
        splitmix64(acc.rotate_left(23) ^ splitmix64(label.wrapping_add(0x632b_e59b_d9b4_e019)))
    })
}

/// Open the stream addressed by `base_seed` and `path`.
pub fn stream(base_seed: u64, path: &[u64]) -> Stream {
    ChaCha8Rng::seed_from_u64(derive_key(base_seed, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_address_same_draws() {
        let a: Vec<u64> = stream(7, &[1, 2]).random_iter().take(4).collect();
        let b: Vec<u64> = stream(7, &[1, 2]).random_iter().take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn nearby_addresses_differ() {
        // seed ^ run collisions must not alias streams
        assert_ne!(derive_key(1, &[0]), derive_key(0, &[1]));
        assert_ne!(derive_key(3, &[1, 2]), derive_key(3, &[2, 1]));
        assert_ne!(derive_key(3, &[1]), derive_key(3, &[1, 0]));
    }
}
