//! Execution policy for data-parallel loops.
//!
//! Parallel execution is compiled in with the `parallel` feature (on by
//! default). Every loop driven through [`Exec`] returns results in index
//! order, so output never depends on the worker count.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// `workers == 0` uses the global pool size.
    Parallel { workers: usize },
    #[default]
    Auto,
}

impl Exec {
    pub fn with_workers(workers: usize) -> Self {
        if workers == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel { workers }
        }
    }

    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Auto => par::map(n, 0, f),
            Exec::Parallel { workers } => par::map(n, workers, f),
        }
    }

    /// Runs `f` with one worker pool sized for this policy; [`Exec::Auto`]
    /// maps inside `f` then reuse that pool instead of building their own.
    pub fn install<R, F>(self, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        match self {
            Exec::Parallel { workers } if workers > 0 => par::install(workers, f),
            _ => f(),
        }
    }

    /// Like [`Exec::map`], but stops at the error with the lowest index.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self {
            Exec::Sequential => (0..n).map(f).collect(),
            _ => self.map(n, f).into_iter().collect(),
        }
    }
}

#[cfg(feature = "parallel")]
mod par {
    use rayon::prelude::*;

    pub use super::par_install::install;

    pub fn map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let run = || (0..n).into_par_iter().map(&f).collect::<Vec<T>>();
        if workers == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("thread pool unavailable ({e}); running on the global pool");
                run()
            }
        }
    }
}

#[cfg(feature = "parallel")]
mod par_install {
    pub fn install<R, F>(workers: usize, f: F) -> R
    where
        R: Send,
        F: FnOnce() -> R + Send,
    {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("thread pool unavailable ({e}); running on the global pool");
                f()
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
mod par {
    pub fn install<R, F>(_workers: usize, f: F) -> R
    where
        F: FnOnce() -> R,
    {
        f()
    }

    pub fn map<T, F>(n: usize, _workers: usize, f: F) -> Vec<T>
    where
        F: Fn(usize) -> T,
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_any_policy() {
        let expected: Vec<usize> = (0..257).map(|i| i * i).collect();
        for exec in [
            Exec::Sequential,
            Exec::Auto,
            Exec::Parallel { workers: 3 },
            Exec::with_workers(8),
        ] {
            assert_eq!(exec.map(257, |i| i * i), expected);
        }
    }

    #[test]
    fn install_runs_inside_one_pool() {
        let out = Exec::with_workers(3).install(|| Exec::Auto.map(10, |i| i + 1));
        assert_eq!(out, (1..=10).collect::<Vec<_>>());
        assert_eq!(Exec::Sequential.install(|| 5), 5);
    }

    #[test]
    fn first_error_by_index() {
        let r: Result<Vec<usize>, usize> = Exec::Parallel { workers: 4 }
            .try_map(100, |i| if i % 7 == 6 { Err(i) } else { Ok(i) });
        assert_eq!(r, Err(6));
    }
}
