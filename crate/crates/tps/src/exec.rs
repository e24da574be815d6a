//! Rayon-backed executor for the core pipelines.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use tps_core::dynamics::Executor;

/// A dedicated worker pool. Results come back in index order, so output
/// does not depend on the number of threads.
pub struct Pool {
    pool: ThreadPool,
}

impl Pool {
    /// `None` or `Some(0)` uses every available core.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = threads.filter(|&n| n > 0) {
            b = b.num_threads(n);
        }
        Ok(Self { pool: b.build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }
}

impl Executor for Pool {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
