use crate::error::{Error, Result};

/// How grid points are scheduled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecOptions {
    /// Use the data-parallel path when the `parallel` feature is built in.
    pub parallel: bool,
    /// Size of a dedicated worker pool; `None` uses the global pool
    /// (one worker per available core).
    pub workers: Option<usize>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        Self {
            parallel: cfg!(feature = "parallel"),
            workers: None,
        }
    }
}

/// `(0..n).map(f)`, possibly across workers. Results keep index order.
pub fn map_indexed<T, F>(n: usize, opts: &ExecOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if let Some(0) = opts.workers {
        return Err(Error::config("workers", "must be >= 1"));
    }
    #[cfg(feature = "parallel")]
    if opts.parallel {
        use rayon::prelude::*;
        return match opts.workers {
            Some(w) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .map_err(|e| Error::config("workers", e.to_string()))?;
                Ok(pool.install(|| (0..n).into_par_iter().map(&f).collect()))
            }
            None => Ok((0..n).into_par_iter().map(&f).collect()),
        };
    }
    Ok((0..n).map(f).collect())
}
