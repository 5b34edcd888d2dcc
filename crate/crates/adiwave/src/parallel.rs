//! Deterministic worker pool.
//!
//! Every parallel kernel in this crate splits its output into contiguous,
//! disjoint index ranges — one per worker — and each output element is
//! computed by the same scalar code path regardless of the split. Reductions
//! (norms) accumulate per-row partial sums and combine them in row order.
//! Results are therefore bitwise identical for any worker count.

use std::ops::Range;

pub struct WorkerPool {
    pool: Option<rayon::ThreadPool>,
    workers: usize,
}

impl WorkerPool {
    /// Builds a pool with `workers` threads. `workers <= 1` runs inline on
    /// the calling thread with no pool at all.
    pub fn new(workers: usize) -> Self {
        let workers = workers.max(1);
        let pool = if workers == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build()
                    .expect("failed to start worker pool"),
            )
        };
        WorkerPool { pool, workers }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Splits `0..len` into at most `workers()` contiguous ranges and runs
    /// `job` once per range. Ranges are disjoint and cover `0..len`.
    pub fn run_ranges<F>(&self, len: usize, job: F)
    where
        F: Fn(Range<usize>) + Sync,
    {
        if len == 0 {
            return;
        }
        let chunks = self.workers.min(len);
        match &self.pool {
            None => job(0..len),
            Some(_) if chunks == 1 => job(0..len),
            Some(pool) => {
                let chunk = len.div_ceil(chunks);
                pool.scope(|s| {
                    let job = &job;
                    let mut start = 0;
                    while start < len {
                        let end = (start + chunk).min(len);
                        s.spawn(move |_| job(start..end));
                        start = end;
                    }
                });
            }
        }
    }
}

/// Raw pointer that may cross thread boundaries. Callers must guarantee that
/// concurrent users touch disjoint elements. Closures must reach the pointer
/// through [`SendPtr::get`] so they capture the wrapper, not the raw field.
#[derive(Clone, Copy)]
pub(crate) struct SendPtr(pub *mut f64);

impl SendPtr {
    #[inline]
    pub(crate) fn get(&self) -> *mut f64 {
        self.0
    }
}

unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}
