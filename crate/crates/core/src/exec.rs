//! Data-parallel helpers.
//!
//! With the `parallel` feature the maps run on the rayon pool; without it
//! they run sequentially. Output order always follows input order, and
//! reductions happen afterwards in a fixed order, so results do not depend
//! on the number of workers.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Sequential map, regardless of features. Used by the benchmarks as the
/// baseline.
pub fn seq_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Runs `f` with at most `threads` workers. `None` uses the global pool.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R: Send>(_threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

/// Pairwise summation in index order; the association pattern depends only
/// on the length of the input.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u32> = (0..1000).collect();
        let ys = par_map(&xs, |x| x * 2);
        assert_eq!(ys, seq_map(&xs, |x| x * 2));
    }

    #[test]
    fn pairwise_sum_is_thread_independent() {
        let xs: Vec<f64> = (0..10_000).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let a = with_threads(Some(1), || pairwise_sum(&par_map(&xs, |x| x.sin())));
        let b = with_threads(Some(4), || pairwise_sum(&par_map(&xs, |x| x.sin())));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
