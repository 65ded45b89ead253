//! Shared helpers for exhaustive and sampled tuple scans.
//!
//! Validation and identity checks quantify over tuple spaces whose size is a
//! product of carrier sizes. Scans below a threshold run serially; larger
//! ones are split across rayon workers with `find_map_first`, so the
//! reported witness is always the one with the smallest flat index no matter
//! how the range was partitioned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::iter::{IntoParallelIterator, ParallelIterator};

const PARALLEL_THRESHOLD: u64 = 1 << 14;

/// Scans `0..count` for the first index where `f` reports a violation.
pub fn find_violation<V, F>(count: u64, f: F) -> Option<V>
where
    V: Send,
    F: Fn(u64) -> Option<V> + Sync,
{
    if count <= PARALLEL_THRESHOLD {
        (0..count).find_map(f)
    } else {
        (0..count).into_par_iter().find_map_first(&f)
    }
}

/// Scans `cap` seeded-random indices from `0..count`; used when the full
/// tuple space is over budget. Deterministic for a fixed seed.
pub fn find_violation_sampled<V, F>(count: u64, cap: u64, seed: u64, f: F) -> Option<V>
where
    V: Send,
    F: Fn(u64) -> Option<V> + Sync,
{
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let picks: Vec<u64> = (0..cap).map(|_| rng.gen_range(0..count)).collect();
    picks.into_par_iter().find_map_first(&f)
}

/// Decodes flat index `t` into mixed-radix digits for the given radices.
pub fn split_index(mut t: u64, radices: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(radices.len());
    for &r in radices {
        out.push(t % r);
        t /= r;
    }
    out
}

/// Product of radices, `None` on overflow.
pub fn tuple_count(radices: &[u64]) -> Option<u64> {
    radices.iter().try_fold(1u64, |p, &r| p.checked_mul(r))
}
