//! Data-parallel helpers. With the `parallel` feature (on by default) case
//! loops run on rayon; without it they run sequentially with the same output.

/// `into_par_iter()` under the `parallel` feature, `into_iter()` otherwise.
macro_rules! iter_maybe_parallel {
    ($expr:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::IntoParallelIterator;
            IntoParallelIterator::into_par_iter($expr)
        }
        #[cfg(not(feature = "parallel"))]
        {
            IntoIterator::into_iter($expr)
        }
    }};
}

/// Evaluates `f(0..n)` and returns the results in case order.
pub fn map_cases<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    use rayon::iter::ParallelIterator;
    iter_maybe_parallel!(0..n).map(f).collect()
}

/// Sequential reference for [`map_cases`].
pub fn map_cases_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let a = map_cases(1000, |i| i * i);
        let b = map_cases_sequential(1000, |i| i * i);
        assert_eq!(a, b);
    }
}
