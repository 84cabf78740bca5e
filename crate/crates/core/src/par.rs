//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper returns results in index order, so output never depends on
//! the execution mode. Without the `parallel` feature both modes run
//! sequentially.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// `f(0), …, f(n-1)` collected in index order.
pub fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_indexed`] over a slice.
pub fn map_slice<S, T, F>(mode: ExecMode, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_indexed(mode, items.len(), |i| f(&items[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_indexed(ExecMode::Sequential, 100, |i| i * i);
        let b = map_indexed(ExecMode::Parallel, 100, |i| i * i);
        assert_eq!(a, b);
    }
}
