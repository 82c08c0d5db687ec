//! Execution strategy for embarrassingly parallel grids.
//!
//! Every sweep in this crate is a pure function mapped over a list of grid
//! points, so parallelism is a drop-in: with the `parallel` feature (on by
//! default) [`map_points`] fans out over the rayon thread pool, without it
//! the same call maps sequentially. [`map_points_seq`] is always
//! sequential, feature or not — the benchmark suite compares the two, and
//! callers that need single-threaded evaluation without rebuilding can use
//! it directly. Both preserve input order, so output bytes never depend on
//! the strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Map `f` over the points, in parallel when the `parallel` feature is
/// enabled. Output order matches input order either way.
#[cfg(feature = "parallel")]
pub fn map_points<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    points.par_iter().map(f).collect()
}

/// Map `f` over the points, in parallel when the `parallel` feature is
/// enabled. Output order matches input order either way.
#[cfg(not(feature = "parallel"))]
pub fn map_points<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    map_points_seq(points, f)
}

/// Map `f` over the points one at a time, regardless of features.
pub fn map_points_seq<T, U, F>(points: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Send + Sync,
{
    points.iter().map(f).collect()
}

/// Cap the worker count. `None` leaves the library default (one worker per
/// core when parallel, moot otherwise). The pool is process-global and
/// built once: the first effective call wins and later calls are ignored,
/// so set this before the first sweep.
pub fn configure_threads(jobs: Option<usize>) -> Result<()> {
    match jobs {
        None => Ok(()),
        Some(0) => Err(Error::NonPositiveField {
            name: "jobs",
            value: 0.0,
        }),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            {
                // An AlreadyInitialized error only means an earlier call
                // (or an earlier sweep) built the pool first; that is the
                // documented first-call-wins behavior, not a failure.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(_n)
                    .build_global();
            }
            Ok(())
        }
    }
}
