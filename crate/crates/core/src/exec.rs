//! Data-parallel evaluation of independent index ranges.
//!
//! Every heavy loop in the crate (grid oracles, boundary scans, sweeps over
//! `s`) goes through [`Execution`]. With the `parallel` feature enabled the
//! work is spread over the rayon pool; without it, or with
//! [`Execution::Sequential`], it runs on the calling thread. Results are
//! identical either way: maps keep index order and extrema break ties on the
//! smallest index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Rayon thread pool. Falls back to sequential without the `parallel` feature.
    Parallel,
    Sequential,
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

/// Smallest and largest values found by [`Execution::extrema`], with the
/// index that produced each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub argmin: usize,
    pub max: f64,
    pub argmax: usize,
}

impl Extrema {
    fn single(i: usize, lo: f64, hi: f64) -> Self {
        Extrema {
            min: lo,
            argmin: i,
            max: hi,
            argmax: i,
        }
    }

    fn merge(self, other: Self) -> Self {
        let (min, argmin) = if (other.min, other.argmin) < (self.min, self.argmin) {
            (other.min, other.argmin)
        } else {
            (self.min, self.argmin)
        };
        let (max, argmax) = if other.max > self.max || (other.max == self.max && other.argmax < self.argmax) {
            (other.max, other.argmax)
        } else {
            (self.max, self.argmax)
        };
        Extrema {
            min,
            argmin,
            max,
            argmax,
        }
    }
}

fn merge_opt(a: Option<Extrema>, b: Option<Extrema>) -> Option<Extrema> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.merge(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..len).map(f).collect()`, in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Minimum of the first and maximum of the second component over all
    /// indices for which `f` returns `Some`. NaN values must not be produced.
    pub fn extrema<F>(self, len: usize, f: F) -> Option<Extrema>
    where
        F: Fn(usize) -> Option<(f64, f64)> + Sync + Send,
    {
        let lift = |i: usize| f(i).map(|(lo, hi)| Extrema::single(i, lo, hi));
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(lift).reduce(|| None, merge_opt);
        }
        (0..len).map(lift).fold(None, merge_opt)
    }
}
