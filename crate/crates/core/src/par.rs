//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they are plain iterator pipelines. Every helper preserves input order, so
//! results are identical in both builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Order-preserving map over a slice.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Order-preserving flat map over a slice.
pub fn flat_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Vec<R> + Sync + Send,
{
    map(items, f).into_iter().flatten().collect()
}

/// True if `f` holds for some item. Short-circuits; which witness triggered it is unspecified.
pub fn any<T, F>(items: &[T], f: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().any(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().any(f)
    }
}

/// Returns the number of worker threads the helpers will use.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` on a pool of `jobs` workers; `None` keeps the global pool.
pub fn with_threads<R, F>(jobs: Option<usize>, f: F) -> crate::Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match jobs {
        None => Ok(f()),
        Some(0) => Err(crate::Error::Input("--jobs must be positive".into())),
        #[cfg(feature = "parallel")]
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::Error::Resource(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(f()),
    }
}
