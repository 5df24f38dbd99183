//! Parallel sum `f:g` of representable functionals.
//!
//! `f:g` is defined through the direct sum of the GNS representations of `f`
//! and `g`: with `D = span{[a]_f ⊕ [a]_g}` and `P` the projection onto `D^⊥`,
//! `(f:g)(a) = ⟨π(a) P(ζ_f ⊕ 0), P(ζ_f ⊕ 0)⟩`. On squares this agrees with
//! the variational formula `inf_b f((a-b)*(a-b)) + g(b* b)`.

use std::sync::Arc;

use crate::algebra::{ensure_same, AlgebraElement, StarAlgebra};
use crate::error::Result;
use crate::functional::Functional;
use crate::gns::GnsTriple;
use crate::linalg::{column_space, herm_pinv, CMat, CVec, RANK_TOL};

/// Relative threshold for declaring `f:g = 0`.
pub const SINGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ParallelSumResult {
    pub value: Functional,
    /// Dimension of `D^⊥`.
    pub projection_rank: usize,
    /// `max_i ‖Q_D^H π(b_i) Pξ‖`, which vanishes when `D^⊥` is invariant.
    pub residual: f64,
}

pub fn parallel_sum(f: &Functional, g: &Functional) -> Result<ParallelSumResult> {
    ensure_same(f.algebra(), g.algebra())?;
    let tf = GnsTriple::build(f)?;
    let tg = GnsTriple::build(g)?;
    Ok(parallel_sum_triples(f.algebra(), &tf, &tg, 1.0))
}

/// `f : (w·g)` from precomputed GNS triples of `f` and `g`.
///
/// The triple of `w·g` is that of `g` with quotient and cyclic vector scaled
/// by `√w` and the same representation.
pub fn parallel_sum_triples(
    algebra: &Arc<StarAlgebra>,
    tf: &GnsTriple,
    tg: &GnsTriple,
    weight: f64,
) -> ParallelSumResult {
    let d = algebra.dim();
    let (rf, rg) = (tf.space_dim, tg.space_dim);
    let n = rf + rg;
    if rf == 0 {
        return ParallelSumResult {
            value: Functional::zero(algebra),
            projection_rank: rg,
            residual: 0.0,
        };
    }
    let sw = weight.max(0.0).sqrt();

    let mut k = CMat::zeros(n, d);
    k.view_mut((0, 0), (rf, d)).copy_from(&tf.quotient);
    if rg > 0 {
        k.view_mut((rf, 0), (rg, d)).copy_from(&tg.quotient.scale(sw));
    }
    let q = column_space(&k, RANK_TOL);

    let mut xi = CVec::zeros(n);
    xi.rows_mut(0, rf).copy_from(&tf.cyclic);
    let p_xi = &xi - &q * (q.adjoint() * &xi);

    let mut values = CVec::zeros(d);
    let mut residual = 0.0f64;
    for i in 0..d {
        let mut image = CVec::zeros(n);
        image.rows_mut(0, rf).copy_from(&(&tf.rep[i] * p_xi.rows(0, rf)));
        if rg > 0 {
            image.rows_mut(rf, rg).copy_from(&(&tg.rep[i] * p_xi.rows(rf, rg)));
        }
        values[i] = p_xi.dotc(&image);
        if q.ncols() > 0 {
            residual = residual.max((q.adjoint() * &image).camax());
        }
    }
    ParallelSumResult {
        value: Functional::new(Arc::clone(algebra), values).expect("dimension matches"),
        projection_rank: n - q.ncols(),
        residual,
    }
}

/// `x^H (M_f - M_f (M_f + M_g)^+ M_f) x`, the minimum of
/// `f((a-b)*(a-b)) + g(b* b)` over `b`.
pub fn variational_value(f: &Functional, g: &Functional, a: &AlgebraElement) -> Result<f64> {
    ensure_same(f.algebra(), g.algebra())?;
    ensure_same(f.algebra(), a.algebra())?;
    let shorted = shorted_gram(&f.gram().entries, &g.gram().entries);
    let x = a.coeffs();
    Ok((x.adjoint() * shorted * x)[(0, 0)].re.max(0.0))
}

/// `M_f - M_f (M_f + M_g)^+ M_f`.
pub fn shorted_gram(mf: &CMat, mg: &CMat) -> CMat {
    let sum = mf + mg;
    let pinv = herm_pinv(&sum, RANK_TOL);
    mf - mf * pinv * mf
}

/// Minimiser `y = (M_f + M_g)^+ M_f x` of the variational problem.
pub fn variational_minimizer(f: &Functional, g: &Functional, a: &AlgebraElement) -> Result<CVec> {
    ensure_same(f.algebra(), g.algebra())?;
    let mf = f.gram().entries;
    let mg = g.gram().entries;
    Ok(herm_pinv(&(&mf + &mg), RANK_TOL) * &mf * a.coeffs())
}

/// `f ⊥ g` iff `‖f:g‖_∞ <= 1e-8 (1 + min(scale_f, scale_g))`.
pub fn is_singular(f: &Functional, g: &Functional) -> Result<bool> {
    let ps = parallel_sum(f, g)?;
    let scale = f.gram().scale.min(g.gram().scale);
    Ok(ps.value.max_norm() <= SINGULAR_TOL * (1.0 + scale))
}

/// Singularity test for functionals known up to absolute noise `floor`;
/// `f:g` must vanish to `max(floor, 1e-8 (1 + min scale))`.
pub fn is_singular_within(f: &Functional, g: &Functional, floor: f64) -> Result<bool> {
    ensure_same(f.algebra(), g.algebra())?;
    let tf = GnsTriple::build_with_floor(f, floor)?;
    let tg = GnsTriple::build_with_floor(g, floor)?;
    let ps = parallel_sum_triples(f.algebra(), &tf, &tg, 1.0);
    let scale = f.gram().scale.min(g.gram().scale);
    Ok(ps.value.max_norm() <= (SINGULAR_TOL * (1.0 + scale)).max(floor))
}
