// SPDX-License-Identifier: Apache-2.0

//! Order-preserving map used by the spectrum and Monte-Carlo drivers.
//!
//! Results are always collected in input order, so any reduction performed
//! afterwards sees the same sequence whatever the thread count.

/// How a data-parallel loop is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon pool; `None` uses the global pool. Falls back to sequential
    /// when the `parallel` feature is disabled.
    #[default]
    Parallel,
    Threads(usize),
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            Some(0) | None => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
        }
    }
}

/// `items.iter().map(f).collect()`, possibly on several threads.
pub fn par_map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        #[cfg(feature = "parallel")]
        Execution::Threads(n) => {
            use rayon::prelude::*;
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                Err(_) => items.iter().map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        _ => items.iter().map(f).collect(),
    }
}

/// `par_map` over `0..n`.
pub fn par_map_range<R, F>(exec: Execution, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    let idx: Vec<usize> = (0..n).collect();
    par_map(exec, &idx, |&i| f(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..1000).collect();
        let seq = par_map(Execution::Sequential, &v, |x| x * x);
        for exec in [Execution::Parallel, Execution::Threads(3)] {
            assert_eq!(par_map(exec, &v, |x| x * x), seq);
        }
    }
}
