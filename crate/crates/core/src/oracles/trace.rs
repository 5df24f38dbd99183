use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::StarAlgebra;
use crate::error::{FuncordError, Result};
use crate::functional::Functional;

type Mat = DMatrix<Complex64>;

/// Relative singular-value cut used for every pseudo-inverse and range here.
const CUT: f64 = 1e-12;
const PSD_TOL: f64 = 1e-9;
/// Closed form and doubling limit must agree to this.
pub const CROSS_CHECK_TOL: f64 = 1e-6;
const LIMIT_STEPS: usize = 26;
const RICHARDSON_LEVELS: usize = 4;

/// Hermitian PSD matrix `F` with `f(T) = trace(F T)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMatrix {
    #[serde(with = "crate::cjson::dmat")]
    pub entries: Mat,
}

fn scale_of(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn symmetrize(m: &Mat) -> Mat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

fn eigen(m: &Mat) -> (DVector<f64>, Mat) {
    let e = symmetrize(m).symmetric_eigen();
    (e.eigenvalues, e.eigenvectors)
}

fn min_eigenvalue(m: &Mat) -> f64 {
    eigen(m).0.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Pseudo-inverse of a Hermitian matrix from its eigen-decomposition.
fn pinv(m: &Mat) -> Mat {
    let (vals, vecs) = eigen(m);
    let top = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let inv = vals.map(|v| {
        if v.abs() > CUT * top {
            Complex64::new(1.0 / v, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &vecs * DMatrix::from_diagonal(&inv) * vecs.adjoint()
}

fn psd_sqrt(m: &Mat) -> Mat {
    let (vals, vecs) = eigen(m);
    let d = DMatrix::from_diagonal(&vals.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0)));
    &vecs * d * vecs.adjoint()
}

/// Orthonormal basis of the range of a Hermitian PSD matrix.
fn range(m: &Mat) -> Mat {
    let (vals, vecs) = eigen(m);
    let top = vals.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..vals.len()).filter(|&k| top > 0.0 && vals[k] > 1e-9 * top).collect();
    Mat::from_fn(m.nrows(), keep.len(), |i, j| vecs[(i, keep[j])])
}

/// Orthonormal basis of the null space of a square matrix: the complement of
/// the row space, read off a column-pivoted QR of `m^H`. Pivots below
/// `1e-9 · scale` count as zero. (nalgebra's complex SVD misbehaves on
/// repeated singular values.)
fn null_space(m: &Mat, scale: f64) -> Mat {
    let n = m.ncols();
    let qr = m.adjoint().col_piv_qr();
    let r = qr.r();
    let rank = (0..r.nrows().min(r.ncols()))
        .take_while(|&i| r[(i, i)].norm() > 1e-9 * scale)
        .count();
    qr.q().columns(rank, n - rank).into_owned()
}

impl TraceMatrix {
    pub fn new(entries: Mat) -> Result<Self> {
        if !entries.is_square() {
            return Err(FuncordError::Construction("trace matrix must be square".into()));
        }
        let scale = scale_of(&entries);
        let defect = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = PSD_TOL * (1.0 + scale);
        if defect > tol {
            return Err(FuncordError::Construction(format!("not Hermitian (defect {defect:.3e})")));
        }
        if entries.nrows() > 0 {
            let low = min_eigenvalue(&entries);
            if low < -tol {
                return Err(FuncordError::Construction(format!(
                    "not positive semidefinite (eigenvalue {low:.3e})"
                )));
            }
        }
        Ok(TraceMatrix { entries })
    }

    fn wrap(entries: Mat) -> Self {
        TraceMatrix { entries: symmetrize(&entries) }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `B - A` is PSD within `1e-9 (1 + scale)`.
    pub fn leq(&self, other: &TraceMatrix) -> bool {
        let diff = &other.entries - &self.entries;
        let scale = scale_of(&self.entries).max(scale_of(&other.entries));
        self.size() == 0 || min_eigenvalue(&diff) >= -PSD_TOL * (1.0 + scale)
    }

    pub fn max_diff(&self, other: &TraceMatrix) -> f64 {
        scale_of(&(&self.entries - &other.entries))
    }
}

fn same_size(a: &TraceMatrix, b: &TraceMatrix) -> Result<()> {
    if a.size() != b.size() {
        return Err(FuncordError::SizeMismatch { expected: a.size(), got: b.size() });
    }
    Ok(())
}

fn parsum_raw(a: &Mat, b: &Mat) -> Mat {
    a - a * pinv(&(a + b)) * a
}

/// `A:B = A - A(A+B)^+ A`, checked against the variational minimiser on
/// the standard basis and a fixed set of probe vectors.
pub fn matrix_parallel_sum(a: &TraceMatrix, b: &TraceMatrix) -> Result<TraceMatrix> {
    same_size(a, b)?;
    let n = a.size();
    let out = parsum_raw(&a.entries, &b.entries);
    let sum_pinv = pinv(&(&a.entries + &b.entries));
    let scale = 1.0 + scale_of(&a.entries).max(scale_of(&b.entries));
    for probe in 0..n + 1 {
        let x = DVector::from_fn(n, |i, _| {
            if probe < n {
                Complex64::new(if i == probe { 1.0 } else { 0.0 }, 0.0)
            } else {
                Complex64::new(1.0 / (i + 1) as f64, (i as f64 * 0.7).sin())
            }
        });
        let y = &sum_pinv * &a.entries * &x;
        let r = &x - &y;
        let quad = |m: &Mat, v: &DVector<Complex64>| (v.adjoint() * m * v)[(0, 0)].re;
        let best = quad(&a.entries, &r) + quad(&b.entries, &y);
        let got = quad(&out, &x);
        let diff = (best - got).abs();
        let bound = 1e-8 * scale * (1.0 + x.norm_squared());
        if diff > bound {
            return Err(FuncordError::CrossCheckFailed {
                what: "matrix parallel sum vs variational minimiser".into(),
                diff,
                bound,
            });
        }
    }
    Ok(TraceMatrix::wrap(out))
}

/// `[B]A = A^{1/2} P_M A^{1/2}` with `M = {x : A^{1/2} x ∈ range B}`,
/// cross-checked against a Richardson-accelerated limit of `A:(2^k B)`.
pub fn matrix_regular_part(a: &TraceMatrix, b: &TraceMatrix) -> Result<TraceMatrix> {
    same_size(a, b)?;
    let n = a.size();
    if n == 0 {
        return Ok(a.clone());
    }
    let root = psd_sqrt(&a.entries);
    let rb = range(&b.entries);
    let proj_b = &rb * rb.adjoint();
    let complement = Mat::identity(n, n) - proj_b;
    let m = null_space(&(complement * &root), scale_of(&root));
    let pm = &m * m.adjoint();
    let closed = TraceMatrix::wrap(&root * pm * &root);

    let limit = doubling_limit(&a.entries, &b.entries);
    let diff = scale_of(&(&closed.entries - &limit));
    let bound = CROSS_CHECK_TOL * (1.0 + scale_of(&a.entries));
    if diff > bound {
        return Err(FuncordError::CrossCheckFailed {
            what: "closed-form matrix regular part vs doubling limit".into(),
            diff,
            bound,
        });
    }
    Ok(closed)
}

/// Richardson table over `A:(2^k B)`; the error expands in powers of `2^{-k}`.
/// Returns the entry whose change from its predecessor in the same column is smallest.
fn doubling_limit(a: &Mat, b: &Mat) -> Mat {
    let seq: Vec<Mat> = (0..LIMIT_STEPS)
        .map(|k| parsum_raw(a, &(b * Complex64::new(2f64.powi(k as i32), 0.0))))
        .collect();
    let mut table = vec![seq];
    for level in 1..=RICHARDSON_LEVELS {
        let factor = 2f64.powi(level as i32);
        let prev = &table[level - 1];
        let next: Vec<Mat> = prev
            .windows(2)
            .map(|w| (&w[1] * Complex64::new(factor, 0.0) - &w[0]) / Complex64::new(factor - 1.0, 0.0))
            .collect();
        table.push(next);
    }
    let mut best = table[0].last().expect("nonempty").clone();
    let mut best_change = f64::INFINITY;
    for column in &table {
        for w in column.windows(2) {
            let change = scale_of(&(&w[1] - &w[0]));
            if change < best_change {
                best_change = change;
                best = w[1].clone();
            }
        }
    }
    best
}

/// `Φ(f)`: the matrix `F` with `f(e_pq) = F[q][p]`.
pub fn trace_dual(f: &Functional) -> Result<TraceMatrix> {
    let alg = f.algebra();
    let n = alg
        .matrix_size()
        .filter(|_| alg.is_full_matrix())
        .ok_or_else(|| FuncordError::NotMatrixAlgebra(alg.label().to_string()))?;
    let phi = f.values();
    TraceMatrix::new(Mat::from_fn(n, n, |q, p| phi[p * n + q]))
}

/// `Φ^{-1}(F)` on `matrix(n)`.
pub fn trace_dual_inverse(m: &TraceMatrix, algebra: &Arc<StarAlgebra>) -> Result<Functional> {
    let n = algebra
        .matrix_size()
        .filter(|_| algebra.is_full_matrix())
        .ok_or_else(|| FuncordError::NotMatrixAlgebra(algebra.label().to_string()))?;
    if n != m.size() {
        return Err(FuncordError::SizeMismatch { expected: n, got: m.size() });
    }
    let values = DVector::from_fn(n * n, |k, _| m.entries[(k % n, k / n)]);
    Functional::new(Arc::clone(algebra), values)
}
