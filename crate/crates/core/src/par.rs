//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature these dispatch to rayon; without it they are
//! plain iterator loops. Output order and reductions are deterministic in
//! both cases: maps preserve index order and `max_by_key` breaks ties by the
//! smallest index.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// `(0..n).map(f).collect()` with index order preserved.
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

/// Maps every index to an optional `(score, value)` and returns the entry with
/// the largest score, ties going to the lowest index. NaN scores are skipped.
pub fn max_by_score<T, F>(n: usize, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> Option<(f64, T)> + Sync + Send,
{
    let pick = |a: Option<(usize, f64, T)>, b: Option<(usize, f64, T)>| match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    };
    let eval = |i: usize| f(i).filter(|(s, _)| !s.is_nan()).map(|(s, v)| (i, s, v));

    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(eval).reduce(|| None, pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(eval).fold(None, pick)
    }
}

/// True when the crate was built with rayon support.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_order() {
        let v = map_indexed(1000, |i| i * i);
        assert!(v.iter().enumerate().all(|(i, &x)| x == i * i));
    }

    #[test]
    fn max_ties_go_to_lowest_index() {
        let best = max_by_score(100, |i| Some(((i % 10) as f64, i))).unwrap();
        assert_eq!(best.0, 9);
        assert_eq!(best.2, 9);
    }

    #[test]
    fn max_skips_nan_and_none() {
        let best = max_by_score(10, |i| match i {
            3 => Some((f64::NAN, i)),
            5 => Some((1.0, i)),
            _ => None,
        });
        assert_eq!(best.map(|b| b.0), Some(5));
        assert!(max_by_score(0, |i| Some((0.0, i))).is_none());
    }
}
