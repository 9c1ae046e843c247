//! Map helpers that fan out over rayon when the `parallel` feature is
//! enabled and fall back to a sequential loop when it is not.
//!
//! Bounds are identical in both builds so switching the feature never
//! changes the API, only the execution strategy.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n` and collects the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Fallible variant of [`map_indexed`]; returns the first error encountered.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let out = map_indexed(100, |i| i * i);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn try_map_indexed_propagates_errors() {
        let ok: Result<Vec<usize>, String> = try_map_indexed(10, Ok);
        assert_eq!(ok.unwrap().len(), 10);

        let err: Result<Vec<usize>, String> = try_map_indexed(10, |i| {
            if i == 7 {
                Err("boom".to_string())
            } else {
                Ok(i)
            }
        });
        assert_eq!(err.unwrap_err(), "boom");
    }
}
