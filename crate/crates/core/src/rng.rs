//! Seeded, splittable randomness.
//!
//! Every experiment starts from one root seed. Child generators are derived
//! from `(root, stream, index)` so that trees, episodes and feature draws
//! never share a stream and parallel execution cannot change results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate. ChaCha8 output is portable across
/// platforms and crate versions, which the byte-identical reports rely on.
pub type SimRng = ChaCha8Rng;

/// Purpose tags for derived streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Attempt = 1,
    Features = 2,
    Episode = 3,
    FailureCurve = 4,
    Hitting = 5,
    Surface = 6,
    Synthetic = 7,
    Pipeline = 8,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed. Distinct `(stream, index)` pairs give unrelated seeds.
pub fn derive_seed(root: u64, stream: Stream, index: u64) -> u64 {
    let a = splitmix64(root ^ splitmix64(stream as u64));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn child_rng(root: u64, stream: Stream, index: u64) -> SimRng {
    rng_from_seed(derive_seed(root, stream, index))
}
