//! Seeded, stream-split random sampling.
//!
//! A run of `n` draws is cut into fixed blocks of `BLOCK_LEN`. Block `b` reads
//! ChaCha8 stream `b` under the run seed, so any draw depends only on
//! `(seed, index)`. Prefixes are stable as `n` grows and any partition of the
//! blocks over workers reproduces the serial result exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK_LEN: usize = 4096;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

pub fn block_count(n: usize) -> usize {
    n.div_ceil(BLOCK_LEN)
}

/// Draw `n` values serially.
pub fn draw<T>(seed: u64, n: usize, mut sample: impl FnMut(&mut ChaCha8Rng) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    for block in 0..block_count(n) {
        let mut rng = block_rng(seed, block as u64);
        let len = BLOCK_LEN.min(n - block * BLOCK_LEN);
        out.extend((0..len).map(|_| sample(&mut rng)));
    }
    out
}

/// Map-reduce over the `n` draws with blocks spread across `workers` threads.
///
/// `fold` consumes one block's values into an accumulator; `merge` must be
/// associative and commutative for the result to be worker-count independent.
pub fn par_fold_blocks<T, A>(
    seed: u64,
    n: usize,
    workers: usize,
    sample: impl Fn(&mut ChaCha8Rng) -> T + Sync,
    fold: impl Fn(&mut A, T) + Sync,
    merge: impl Fn(A, A) -> A + Sync + Send,
    init: impl Fn() -> A + Sync + Send,
) -> A
where
    A: Send,
{
    let run = || {
        (0..block_count(n))
            .into_par_iter()
            .map(|block| {
                let mut rng = block_rng(seed, block as u64);
                let len = BLOCK_LEN.min(n - block * BLOCK_LEN);
                let mut acc = init();
                for _ in 0..len {
                    fold(&mut acc, sample(&mut rng));
                }
                acc
            })
            .reduce(&init, &merge)
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}
