//! Seed derivation.
//!
//! Every stochastic operation takes an explicit `u64` seed. Child seeds are
//! derived by mixing a parent seed with a tag and an index through the
//! SplitMix64 finalizer, and the resulting seed keys a ChaCha8 stream. The
//! derivation is a pure function, so a trial's randomness does not depend on
//! which thread runs it or in which order trials complete.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `parent` with `word`; not commutative in its arguments.
pub fn mix(parent: u64, word: u64) -> u64 {
    splitmix(parent ^ splitmix(word))
}

/// Hashes a string tag (FNV-1a) so it can be mixed into a seed.
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Derives a child seed from a parent, a string tag and an index.
pub fn derive(parent: u64, label: &str, index: u64) -> u64 {
    mix(mix(parent, tag(label)), index)
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Encodes a float exactly for seed mixing.
pub fn float_word(x: f64) -> u64 {
    x.to_bits()
}
