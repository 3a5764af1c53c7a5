//! Counter-based seed derivation.
//!
//! A master seed expands into sub-seeds addressed by a path of counters, e.g.
//! `[trial, source]`. Each sub-seed depends only on the master seed and its
//! own path, so any trial or source can be regenerated on its own.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed of `master` at `path`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |state, &counter| mix64(state ^ mix64(counter.wrapping_add(GOLDEN))))
}
