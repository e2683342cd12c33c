//! Order-preserving data-parallel helpers.
//!
//! With the `parallel` feature the work is spread over the rayon pool;
//! without it (or with `parallel == false` at the call site) the same
//! closure runs sequentially. Results always come back in index order, so
//! callers see identical output either way.

/// Evaluates `f(0..len)` and collects the results in index order.
pub fn map_indexed<T, F>(len: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && len > 1 {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallel;
    (0..len).map(f).collect()
}

/// Whether this build was compiled with rayon support.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_in_both_modes() {
        let seq = map_indexed(1000, false, |i| i * i);
        let par = map_indexed(1000, true, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[31], 961);
    }

    #[test]
    fn empty_range() {
        let out: Vec<usize> = map_indexed(0, true, |i| i);
        assert!(out.is_empty());
    }
}
