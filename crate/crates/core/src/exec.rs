//! Order-preserving map that runs on the rayon pool when the `parallel`
//! feature is enabled and the caller asks for it.

pub fn map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Whether [`map`] can actually run in parallel in this build.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
