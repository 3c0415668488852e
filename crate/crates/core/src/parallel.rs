//! Data-parallel helpers with a deterministic, order-preserving merge.
//!
//! With the `parallel` feature (default) work is spread over the rayon pool
//! unless [`set_sequential`] has switched it off at runtime. Results are
//! always returned in index order so downstream sums do not depend on thread
//! scheduling.

use std::sync::atomic::{AtomicBool, Ordering};

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force sequential execution even when the `parallel` feature is enabled.
pub fn set_sequential(sequential: bool) {
    FORCE_SEQUENTIAL.store(sequential, Ordering::SeqCst);
}

/// Whether [`map_indexed`] currently runs on the thread pool.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::SeqCst)
}

/// `(0..n).map(f).collect()`, possibly in parallel, in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Apply `f` to contiguous blocks of `0..n`, returning per-block results in
/// order. Block boundaries depend only on `n` and `block`.
pub fn map_blocks<T, F>(n: usize, block: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let block = block.max(1);
    let nb = n.div_ceil(block);
    map_indexed(nb, |b| f(b * block..((b + 1) * block).min(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v = map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, x)| *x == i * i));
        let b = map_blocks(10, 3, |r| r.len());
        assert_eq!(b, vec![3, 3, 3, 1]);
    }
}
