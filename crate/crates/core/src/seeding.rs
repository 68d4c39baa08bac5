//! Counter-based seed derivation so that stream `k` does not depend on how
//! many other streams were drawn before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser applied to `master ^ golden·(k+1)`.
pub fn derive_seed(master: u64, k: u64) -> u64 {
    let mut z = master ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(master: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, k))
}
