//! Deterministic input builders shared by the criterion benches. The crate
//! exists for its `benches/` directory; nothing here is part of the engine.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible byte string, the shape of a fuzzing input.
pub fn random_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random()).collect()
}

/// A reproducible pool of distance vectors: `n` rows over `m` objectives,
/// entries spread over [0, k] with `k` (unvisited) the most common value,
/// the texture the minimizer sees mid-campaign.
pub fn random_rows(n: usize, m: usize, k: u64, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    if rng.random_range(0..3u32) == 0 {
                        k
                    } else {
                        rng.random_range(0..=k)
                    }
                })
                .collect()
        })
        .collect()
}
