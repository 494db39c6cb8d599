//! Data-parallel fan-out with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`Exec::Parallel`] runs on the
//! rayon global pool. Without it, both strategies run sequentially. Results
//! always come back in input order, so reports do not depend on scheduling.

/// Execution strategy for batch evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Order-preserving map over `0..n`.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(Exec::Sequential, &xs, |x| x * x);
        let par = map(Exec::Parallel, &xs, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[10], 100);
        assert_eq!(
            map_range(Exec::Parallel, 50, |i| i + 1),
            (1..=50).collect::<Vec<_>>()
        );
    }
}
