//! Per-worker fan-out. With the `parallel` feature each superstep phase runs
//! its workers on the rayon pool; otherwise, or when sequential execution is
//! requested, workers run one after another on the calling thread. The end of
//! each call is the phase barrier either way.

use crate::engine::Execution;

pub(crate) fn map_workers<T, R, F>(exec: Execution, items: &mut [T], f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(usize, &mut T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items
                .par_iter_mut()
                .enumerate()
                .map(|(i, t)| f(i, t))
                .collect()
        }
        _ => items.iter_mut().enumerate().map(|(i, t)| f(i, t)).collect(),
    }
}

/// Whether [`Execution::Parallel`] actually runs on a thread pool in this build.
pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
