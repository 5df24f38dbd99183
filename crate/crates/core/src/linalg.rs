//! Dense Hermitian helpers used by the generic pipeline.
//!
//! The oracles in [`crate::oracles`] deliberately do not go through this
//! module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Relative eigenvalue / singular value cut shared by every rank decision.
pub const RANK_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `A - A^H` in absolute value.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of the Hermitian part of a matrix, eigenvalues sorted
/// in decreasing order.
#[derive(Debug, Clone)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEigen {
    pub fn new(m: &CMat) -> Self {
        let n = m.nrows();
        if n == 0 {
            return HermEigen {
                values: Vec::new(),
                vectors: CMat::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(hermitian_part(m));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMat::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        HermEigen { values, vectors }
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `rel * max(λ_max, 0)`. A zero spectrum has rank 0.
    pub fn rank(&self, rel: f64) -> usize {
        let top = self.max();
        if top <= 0.0 {
            return 0;
        }
        self.values.iter().take_while(|&&v| v > rel * top).count()
    }

    /// Orthonormal basis of the numerical range.
    pub fn range_basis(&self, rel: f64) -> CMat {
        let r = self.rank(rel);
        self.vectors.columns(0, r).into_owned()
    }
}

/// Orthonormal basis of the column space of a rectangular matrix.
///
/// Uses column-pivoted QR and keeps the leading columns with
/// `|R_ii| > rel · |R_00|`. nalgebra's complex SVD can return wrong singular
/// vectors when singular values repeat, so it is avoided here.
pub fn column_space(k: &CMat, rel: f64) -> CMat {
    if k.nrows() == 0 || k.ncols() == 0 {
        return CMat::zeros(k.nrows(), 0);
    }
    let qr = k.clone().col_piv_qr();
    let r = qr.r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].norm()).collect();
    let top = diag.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return CMat::zeros(k.nrows(), 0);
    }
    let rank = diag.iter().take_while(|&&v| v > rel * top).count();
    qr.q().columns(0, rank).into_owned()
}

/// Hermitian square root of the pseudo-inverse restricted to the numerical range.
pub fn pinv_sqrt(eig: &HermEigen, rel: f64) -> CMat {
    let n = eig.vectors.nrows();
    let r = eig.rank(rel);
    let mut out = CMat::zeros(n, n);
    for i in 0..r {
        let col = eig.vectors.column(i);
        let w = 1.0 / eig.values[i].sqrt();
        out += (&col * col.adjoint()).scale(w);
    }
    out
}

/// Pseudo-inverse of a Hermitian PSD matrix through its eigen-decomposition.
pub fn herm_pinv(m: &CMat, rel: f64) -> CMat {
    let eig = HermEigen::new(m);
    let n = m.nrows();
    let r = eig.rank(rel);
    let mut out = CMat::zeros(n, n);
    for i in 0..r {
        let col = eig.vectors.column(i);
        out += (&col * col.adjoint()).scale(1.0 / eig.values[i]);
    }
    out
}

/// Spectral norm of a Hermitian matrix (largest absolute eigenvalue).
pub fn herm_norm(m: &CMat) -> f64 {
    let eig = HermEigen::new(m);
    eig.max().abs().max(eig.min().abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_descending() {
        let m = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]));
        let e = HermEigen::new(&m);
        assert_eq!(e.values.len(), 3);
        assert!((e.values[0] - 3.0).abs() < 1e-14);
        assert!((e.values[2] - 1.0).abs() < 1e-14);
        assert_eq!(e.rank(RANK_TOL), 3);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let e = HermEigen::new(&CMat::zeros(3, 3));
        assert_eq!(e.rank(RANK_TOL), 0);
        assert_eq!(e.range_basis(RANK_TOL).ncols(), 0);
    }

    #[test]
    fn column_space_of_rank_one() {
        let k = CMat::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        let q = column_space(&k, RANK_TOL);
        assert_eq!(q.ncols(), 1);
        assert!((q[(0, 0)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn pinv_of_singular_projector() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), ZERO, ZERO, ZERO]);
        let p = herm_pinv(&m, RANK_TOL);
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!(p[(1, 1)].norm() < 1e-14);
    }
}
