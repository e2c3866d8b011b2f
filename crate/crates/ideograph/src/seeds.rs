//! Deterministic seed derivation. Every random stage of the pipeline
//! takes its own seed derived from one master seed and a list of string
//! labels, so any stage can be re-run in isolation and reproduce the
//! same bytes.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Derive a child seed from `master` and the given labels.
///
/// The scheme is fixed: fold each label into the state with FNV-1a and
/// finalize with SplitMix64. It is not cryptographic; it only has to be
/// stable across runs and platforms.
pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut state = splitmix64(master);
    for label in labels {
        state = splitmix64(state ^ fnv1a(label.as_bytes()));
    }
    state
}

/// ChaCha generator seeded via [`derive_seed`].
pub fn rng_for(master: u64, labels: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, labels))
}
