//! Order-preserving parallel map over independent work items.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::ThreadPool;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RANKDIR_THREADS";

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            builder = builder.num_threads(n);
        }
        builder.build().expect("failed to build worker pool")
    })
}

/// `(0..len).map(f)` evaluated in parallel; results come back in index
/// order, so any later reduction is independent of scheduling.
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    pool().install(|| (0..len).into_par_iter().map(f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let v = map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, x)| *x == i * i));
    }
}
