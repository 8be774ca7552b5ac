//! Index-ordered map over independent work items.

use alloc::vec::Vec;

use crate::Result;

/// Evaluates `f(i)` for `i in 0..n` and collects in index order, stopping at
/// the first error (by index).
pub(crate) fn try_map<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
