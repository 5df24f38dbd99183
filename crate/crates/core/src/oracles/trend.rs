use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::trace::{matrix_regular_part, TraceMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendPoint {
    pub dim: usize,
    pub c_min: f64,
    /// `max_{n<=dim} α_n/β_n`
    pub expected: f64,
    /// `‖[G]F - F‖_∞`, or NaN if the oracle cross-check failed.
    pub regular_defect: f64,
}

fn diag(v: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_diagonal(v)
}

/// With `α_n = n^-2`, `β_n = n^-4` truncated to `dim`, the smallest `c` with
/// `F ≤ c G` for every `dim` in `2..=d`.
pub fn truncated_counterexample_trend(d: usize) -> Vec<TrendPoint> {
    (2..=d.max(2)).map(trend_point).collect()
}

pub fn trend_point(dim: usize) -> TrendPoint {
    let alpha = DVector::from_fn(dim, |i, _| ((i + 1) as f64).powi(-2));
    let beta = DVector::from_fn(dim, |i, _| ((i + 1) as f64).powi(-4));
    let f = diag(&alpha);
    let g = diag(&beta);
    let g_inv_sqrt = diag(&beta.map(|b| 1.0 / b.sqrt()));
    let c_min = (&g_inv_sqrt * &f * &g_inv_sqrt).symmetric_eigen().eigenvalues.max();
    let expected = alpha.zip_map(&beta, |a, b| a / b).max();

    let cplx = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let regular_defect = match (TraceMatrix::new(cplx(&f)), TraceMatrix::new(cplx(&g))) {
        (Ok(tf), Ok(tg)) => matrix_regular_part(&tf, &tg)
            .map(|r| r.max_diff(&tf))
            .unwrap_or(f64::NAN),
        _ => f64::NAN,
    };
    TrendPoint { dim, c_min, expected, regular_defect }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squares() {
        for d in [2usize, 4, 8, 16, 32] {
            let p = trend_point(d);
            let want = (d * d) as f64;
            assert!((p.c_min - want).abs() <= 0.01 * want, "{p:?}");
            assert!(p.regular_defect < 1e-9, "{p:?}");
        }
        assert_eq!(truncated_counterexample_trend(8).len(), 7);
    }
}
