//! GNS triples of representable functionals.
//!
//! With `M = U Λ U^H` the Gram matrix, the GNS space is spanned by the
//! eigenvectors with eigenvalue above the rank cut. An element with
//! coefficients `x` has GNS coordinates `Λ^{1/2} U^H x`; left multiplication
//! descends to the quotient exactly when it preserves `ker M`.

use crate::error::{FuncordError, RepresentabilityCondition, Result};
use crate::functional::{Functional, ORDER_TOL};
use crate::linalg::{max_abs_vec, CMat, CVec, HermEigen, RANK_TOL};

/// Residual bound for the cyclic condition: `1e-8 (1 + ‖φ‖_∞)`.
const CYCLIC_TOL: f64 = 1e-8;
/// Normalised residual bound for the quotient action.
const ACTION_TOL: f64 = 1e-7;
/// Reconstruction bound `1e-7 (1 + ‖φ‖_∞)`.
const VERIFY_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct GnsTriple {
    /// Dimension `r` of the GNS space (rank of the Gram matrix).
    pub space_dim: usize,
    /// `π(b_i)` as `r × r` matrices.
    pub rep: Vec<CMat>,
    /// Cyclic vector `ζ`.
    pub cyclic: CVec,
    /// `r × dim` map from coefficient vectors to GNS coordinates.
    pub quotient: CMat,
    /// `f(b_i) - ⟨π(b_i)ζ, ζ⟩`, worst case.
    pub residual: f64,
}

pub(crate) struct Analysis {
    pub eigen: HermEigen,
    pub rank: usize,
    pub hilbert_bound: f64,
    /// `Λ^{-1/2} U^H conj(φ)`
    pub cyclic: CVec,
}

impl GnsTriple {
    /// Checks the representability conditions and computes the Riesz vector.
    ///
    /// `floor` is an absolute noise level: Gram eigenvalues below it are treated
    /// as zero and residuals up to it are tolerated. Pass 0 for exact inputs.
    pub(crate) fn analyse(f: &Functional, floor: f64) -> Result<Analysis> {
        let alg = f.algebra();
        let gram = f.gram();
        let phi = f.values();
        let phi_norm = max_abs_vec(phi);

        let pos_tol = (ORDER_TOL * (1.0 + gram.scale)).max(floor);
        let pos = gram.eigen();
        let defect = crate::linalg::hermitian_defect(&gram.entries);
        if defect > pos_tol || pos.min() < -pos_tol {
            return Err(FuncordError::NotRepresentable {
                condition: RepresentabilityCondition::Positivity,
                detail: format!(
                    "min Gram eigenvalue {:.3e}, hermitian defect {:.3e}",
                    pos.min(),
                    defect
                ),
            });
        }

        let eigen = pos;
        let top = eigen.max();
        let cut = (RANK_TOL * top).max(floor);
        let rank = if top <= 0.0 {
            0
        } else {
            eigen.values.iter().take_while(|&&v| v > cut).count()
        };
        let basis = eigen.vectors.columns(0, rank);

        let target = phi.map(|z| z.conj());
        let coeffs = basis.adjoint() * &target;
        let outside = &target - &basis * &coeffs;
        let outside_norm = max_abs_vec(&outside);
        if outside_norm > CYCLIC_TOL * (1.0 + phi_norm) + floor {
            return Err(FuncordError::NotRepresentable {
                condition: RepresentabilityCondition::CyclicBound,
                detail: format!(
                    "value vector leaves the range of the Gram matrix by {outside_norm:.3e}"
                ),
            });
        }

        if rank > 0 && rank < alg.dim() {
            let kernel = eigen.vectors.columns(rank, alg.dim() - rank);
            let sqrt_top = top.sqrt();
            for i in 0..alg.dim() {
                let left = alg.left_mul_matrix(i);
                let leaked = basis.adjoint() * &left * kernel;
                let mut worst = 0.0f64;
                for k in 0..rank {
                    let w = eigen.values[k].sqrt();
                    for j in 0..leaked.ncols() {
                        worst = worst.max(w * leaked[(k, j)].norm());
                    }
                }
                let norm = left.iter().map(|z| z.norm()).fold(1.0, f64::max);
                if worst > ACTION_TOL * sqrt_top * norm + floor.sqrt() {
                    return Err(FuncordError::NotRepresentable {
                        condition: RepresentabilityCondition::QuotientAction,
                        detail: format!(
                            "left multiplication by basis element {i} does not preserve the Gram kernel (residual {worst:.3e})"
                        ),
                    });
                }
            }
        }

        let mut cyclic = CVec::zeros(rank);
        let mut hilbert_bound = 0.0;
        for k in 0..rank {
            let z = coeffs[k] / eigen.values[k].sqrt();
            hilbert_bound += z.norm_sqr();
            cyclic[k] = z;
        }
        Ok(Analysis {
            eigen,
            rank,
            hilbert_bound,
            cyclic,
        })
    }

    pub fn build(f: &Functional) -> Result<Self> {
        Self::build_with_floor(f, 0.0)
    }

    /// GNS triple of a functional known only up to absolute noise `floor`.
    pub fn build_with_floor(f: &Functional, floor: f64) -> Result<Self> {
        let alg = f.algebra();
        let Analysis {
            eigen,
            rank,
            cyclic,
            ..
        } = Self::analyse(f, floor)?;
        let d = alg.dim();
        let basis = eigen.vectors.columns(0, rank).into_owned();
        let sqrt_vals: Vec<f64> = eigen.values[..rank].iter().map(|v| v.sqrt()).collect();

        // quotient = Λ^{1/2} U^H ; right inverse U Λ^{-1/2}
        let mut quotient = basis.adjoint();
        let mut right_inv = basis.clone();
        for k in 0..rank {
            quotient.row_mut(k).scale_mut(sqrt_vals[k]);
            right_inv.column_mut(k).scale_mut(1.0 / sqrt_vals[k]);
        }
        let rep: Vec<CMat> = (0..d)
            .map(|i| &quotient * alg.left_mul_matrix(i) * &right_inv)
            .collect();

        let mut triple = GnsTriple {
            space_dim: rank,
            rep,
            cyclic,
            quotient,
            residual: 0.0,
        };
        let phi = f.values();
        let mut residual = 0.0f64;
        for i in 0..d {
            residual = residual.max((phi[i] - triple.vector_state(&triple.rep[i])).norm());
        }
        triple.residual = residual;
        let bound = VERIFY_TOL * (1.0 + max_abs_vec(phi)) + 10.0 * floor;
        if residual > bound {
            return Err(FuncordError::VerificationFailed { residual, bound });
        }
        Ok(triple)
    }

    /// `⟨T ζ, ζ⟩`.
    pub fn vector_state(&self, t: &CMat) -> num_complex::Complex64 {
        if self.space_dim == 0 {
            return crate::linalg::ZERO;
        }
        (self.cyclic.adjoint() * t * &self.cyclic)[(0, 0)]
    }

    /// `π(a)` for a coefficient vector.
    pub fn represent(&self, x: &CVec) -> CMat {
        let r = self.space_dim;
        let mut out = CMat::zeros(r, r);
        for (i, xi) in x.iter().enumerate() {
            if *xi != crate::linalg::ZERO {
                out += self.rep[i].map(|z| z * xi);
            }
        }
        out
    }

    /// GNS coordinates `[a]`.
    pub fn coords(&self, x: &CVec) -> CVec {
        &self.quotient * x
    }

    /// `‖ζ‖²`.
    pub fn cyclic_norm_sqr(&self) -> f64 {
        self.cyclic.norm_squared()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StarAlgebra;
    use crate::linalg::c;
    use std::sync::Arc;

    #[test]
    fn functions_triple() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = Functional::from_real(&f2, &[1.0, 1.0]).unwrap();
        let t = GnsTriple::build(&f).unwrap();
        assert_eq!(t.space_dim, 2);
        assert!((t.cyclic_norm_sqr() - 2.0).abs() < 1e-12);
        // π(δ1) is a rank-one projection, and π(δ1)ζ = [δ1]
        let p = &t.rep[0];
        assert!((p * p - p).camax() < 1e-12);
        assert!((p.trace().re - 1.0).abs() < 1e-12);
        let e0 = f2.basis_vector(0);
        assert!((p * &t.cyclic - t.coords(&e0)).camax() < 1e-12);
    }

    #[test]
    fn pure_state_of_m2() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        let f = Functional::from_real(&m, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let t = GnsTriple::build(&f).unwrap();
        assert_eq!(t.space_dim, 2);
        assert!((t.cyclic_norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_functional_triple() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        let t = GnsTriple::build(&Functional::zero(&m)).unwrap();
        assert_eq!(t.space_dim, 0);
        assert_eq!(t.cyclic.len(), 0);
        assert_eq!(t.vector_state(&t.rep[1]), crate::linalg::ZERO);
    }

    #[test]
    fn representation_is_star_homomorphism() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        let f = Functional::new(
            Arc::clone(&m),
            CVec::from_vec(vec![c(0.7, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.3, 0.0)]),
        )
        .unwrap();
        let t = GnsTriple::build(&f).unwrap();
        assert_eq!(t.space_dim, 4);
        for i in 0..4 {
            let bi = m.basis_vector(i);
            let star = t.represent(&m.star_coeffs(&bi));
            assert!((star - t.rep[i].adjoint()).camax() < 1e-10);
            for j in 0..4 {
                let prod = m.mul_coeffs(&bi, &m.basis_vector(j));
                assert!((&t.rep[i] * &t.rep[j] - t.represent(&prod)).camax() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_product_rejected() {
        let z = Arc::new(StarAlgebra::zero_product(1).unwrap());
        let f = Functional::from_real(&z, &[1.0]).unwrap();
        assert!(matches!(
            GnsTriple::build(&f),
            Err(FuncordError::NotRepresentable {
                condition: RepresentabilityCondition::CyclicBound,
                ..
            })
        ));
    }

    #[test]
    fn kernel_is_left_ideal_for_pure_state() {
        // Cauchy-Schwarz makes the Gram kernel a left ideal, so the action check passes
        let m = Arc::new(StarAlgebra::matrix(3).unwrap());
        let mut v = vec![0.0; 9];
        v[4] = 1.0;
        let f = Functional::from_real(&m, &v).unwrap();
        let t = GnsTriple::build(&f).unwrap();
        assert_eq!(t.space_dim, 3);
    }
}
