use rayon::prelude::*;

use super::HarnessError;

/// Replicas per task; tallies are summed task by task in index order.
const CHUNK: u64 = 256;

/// Runs `n` replicas on `workers` threads (0 for the default pool).
///
/// Replica `i` sees only its index, and per-replica tallies are combined by
/// an associative and commutative `merge`, so the result does not depend on
/// the worker count.
pub fn run_replicas<S, T, I, F, M>(n: u64, workers: usize, init: I, f: F, merge: M) -> Result<T, HarnessError>
where
    T: Default + Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64, &mut T) -> Result<(), HarnessError> + Sync + Send,
    M: Fn(&mut T, T) + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map_init(&init, |state, c| {
                let mut acc = T::default();
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    f(state, i, &mut acc)?;
                }
                Ok(acc)
            })
            .try_reduce(T::default, |mut a, b| {
                merge(&mut a, b);
                Ok(a)
            })
    };
    if workers == 0 {
        return job();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| HarnessError::Runtime(e.to_string()))?;
    pool.install(job)
}

/// Adds `b` into `a` entry by entry, growing `a` as needed.
pub fn add_counts(a: &mut Vec<u64>, b: Vec<u64>) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}
