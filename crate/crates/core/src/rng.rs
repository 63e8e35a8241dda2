//! Seeded random streams.
//!
//! Every random draw in the crate comes from `ChaCha8Rng` (rand_chacha 0.9)
//! seeded with `seed_from_u64(seed)` and positioned on an explicit stream
//! index. Integer ranges are sampled with rand 0.9's `random_range`; both
//! crate versions are pinned by the lock file, so outputs agree across
//! platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `(seed, stream)`. Stream 0 is the default single-worker
/// stream; parallel workers and per-trial sweeps use their own index.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `total` units of work over `workers` chunks; the first
/// `total % workers` chunks get one extra unit.
pub(crate) fn partition(total: u64, workers: usize) -> Vec<u64> {
    let workers = workers.max(1) as u64;
    let base = total / workers;
    let extra = total % workers;
    (0..workers).map(|w| base + u64::from(w < extra)).collect()
}
