/// Selects how the data-parallel loops in this crate are executed.
///
/// `Parallel` uses the global rayon pool when the `parallel` feature is
/// compiled in and silently degrades to `Sequential` otherwise. Both modes
/// produce identical results; only wall-clock time differs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Order-preserving map over a slice.
    pub(crate) fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Fold each item into an accumulator and combine the partial
    /// accumulators. `combine` must be associative.
    pub(crate) fn fold_reduce<T, A, Id, F, C>(self, items: &[T], identity: Id, fold: F, combine: C) -> A
    where
        T: Sync,
        A: Send,
        Id: Fn() -> A + Sync + Send,
        F: Fn(A, &T) -> A + Sync + Send,
        C: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return items
                .par_iter()
                .fold(&identity, &fold)
                .reduce(&identity, &combine);
        }
        let _ = &combine;
        items.iter().fold(identity(), fold)
    }
}
