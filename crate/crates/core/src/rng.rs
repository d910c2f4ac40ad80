//! Seeded, counter-based randomness. Every replica draws from its own
//! stream of one ChaCha generator, so batches reproduce bit-for-bit no
//! matter how they are scheduled across threads.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Run `count` replicas across worker threads; output order is by replica
/// index regardless of scheduling.
pub fn map_replicas<T, F>(seed: u64, count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, ChaCha8Rng) -> T + Sync,
{
    let threads = threads.max(1);
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slice) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (k, slot) in slice.iter_mut().enumerate() {
                    let replica = (t * chunk + k) as u64;
                    *slot = Some(f(replica, replica_rng(seed, replica)));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("replica completed")).collect()
}
