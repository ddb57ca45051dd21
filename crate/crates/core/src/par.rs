//! Deterministic chunked reductions over spheres.

use std::sync::Arc;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::freegroup::{Letter, Sphere};

/// Worker pool; results never depend on the number of workers.
#[derive(Clone, Debug, Default)]
pub struct Pool {
    inner: Option<Arc<ThreadPool>>,
}

impl Pool {
    /// Uses rayon's global pool.
    pub fn global() -> Self {
        Self { inner: None }
    }

    pub fn with_workers(workers: usize) -> Self {
        let pool = ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
        Self { inner: Some(Arc::new(pool)) }
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.inner {
            Some(p) => p.install(f),
            None => f(),
        }
    }

    /// Folds each chunk of `sphere` with `fold` starting from `init()`, then
    /// combines the chunk results in sphere order with `combine`.
    pub fn sphere_reduce<T: Send>(
        &self,
        sphere: &Sphere,
        init: impl Fn() -> T + Sync + Send,
        fold: impl Fn(&mut T, &[Letter]) + Sync + Send,
        combine: impl Fn(T, T) -> T,
    ) -> T {
        let chunks = sphere.chunks();
        let partials: Vec<T> = self.install(|| {
            chunks
                .par_iter()
                .map(|chunk| {
                    let mut acc = init();
                    chunk.for_each(|w| fold(&mut acc, w));
                    acc
                })
                .collect()
        });
        partials.into_iter().fold(init(), combine)
    }
}
