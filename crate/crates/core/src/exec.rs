//! Sweep execution: rayon when the `parallel` feature is on, plain
//! iterators otherwise.
//!
//! Sweeps iterate a dense index range `0..n` (callers encode tuples into
//! the index) and either look for the first counterexample or collect
//! mapped results.  Both modes return identical values: the parallel
//! search uses `find_map_first`, which respects index order, and the
//! parallel collect preserves order by construction.
//!
//! `set_parallel(false)` forces the sequential path at runtime even when
//! the feature is compiled in; the bench suite uses this to compare the
//! two paths inside one binary.

use std::sync::atomic::{AtomicBool, Ordering};

static PARALLEL: AtomicBool = AtomicBool::new(cfg!(feature = "parallel"));

/// Enable or disable the rayon path at runtime.  No-op (always
/// sequential) when the `parallel` feature is compiled out.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled && cfg!(feature = "parallel"), Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    PARALLEL.load(Ordering::Relaxed)
}

/// First `Some` produced over `0..n`, in index order.
pub fn find_first<T, F>(n: u64, f: F) -> Option<T>
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().find_map_first(f);
    }
    (0..n).find_map(f)
}

/// `f` applied to every index, results concatenated in index order.
pub fn collect_vec<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().flat_map_iter(f).collect();
    }
    (0..n).flat_map(f).collect()
}

/// Decode index `i` of the product space `base^len` into digits,
/// most significant first.  The standard encoding for tuple sweeps.
pub fn digits(mut i: u64, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0usize; len];
    for slot in (0..len).rev() {
        out[slot] = (i % base as u64) as usize;
        i /= base as u64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn find_first_returns_lowest_index() {
        let hit = find_first(1000, |i| if i % 7 == 3 { Some(i) } else { None });
        assert_eq!(hit, Some(3));
    }

    #[test]
    fn collect_preserves_order() {
        let v = collect_vec(100, |i| if i % 10 == 0 { vec![i, i + 1] } else { vec![] });
        let expect: Vec<u64> = (0..10).flat_map(|k| vec![10 * k, 10 * k + 1]).collect();
        assert_eq!(v, expect);
    }

    #[test]
    fn sequential_mode_agrees() {
        let par = collect_vec(50, |i| vec![i * i]);
        set_parallel(false);
        let seq = collect_vec(50, |i| vec![i * i]);
        set_parallel(true);
        assert_eq!(par, seq);
    }

    #[test]
    fn digit_decoding() {
        assert_eq!(digits(5, 2, 3), vec![1, 0, 1]);
        assert_eq!(digits(0, 3, 2), vec![0, 0]);
        assert_eq!(digits(8, 3, 2), vec![2, 2]);
    }
}
