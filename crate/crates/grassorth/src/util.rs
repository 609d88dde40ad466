//! Execution and seeding helpers shared by the sampling engines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for trial `index` of a run with master seed `seed`. Each trial gets
/// its own ChaCha stream, so results are independent of execution order and
/// identical between the parallel and sequential paths.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Runs `f` over `0..n`, collecting results in index order. Parallel when the
/// `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn batch_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn batch_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sequential twin of [`batch_map`], kept available for benchmarking the
/// parallel speedup.
pub fn batch_map_seq<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}
