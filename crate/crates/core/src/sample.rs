//! Seeded random inputs for property sweeps and oracle checks.
//!
//! Every case draws from its own ChaCha8 stream derived from `(seed, case)`,
//! so results do not depend on how cases are scheduled across threads.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, AlgebraSpec, StarAlgebra};
use crate::error::{FuncordError, Result};
use crate::functional::Functional;
use crate::linalg::{c, CMat, CVec, HermEigen};
use crate::parallel_sum::parallel_sum_triples;
use crate::gns::GnsTriple;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for case `case` of a run seeded with `seed`.
    pub fn for_case(seed: u64, case: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(case as u64);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn complex(&mut self) -> num_complex::Complex64 {
        c(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    /// `X X^H` with `X` an `n × rank` matrix of uniform complex entries.
    pub fn psd(&mut self, n: usize, rank: usize) -> CMat {
        let x = CMat::from_fn(n, rank, |_, _| self.complex());
        &x * x.adjoint()
    }

    /// Orthogonal projection onto a random `k`-dimensional subspace of the
    /// column space of `basis` (orthonormal columns).
    pub fn projection_within(&mut self, basis: &CMat, k: usize) -> CMat {
        let r = basis.ncols();
        let k = k.min(r);
        if k == 0 {
            return CMat::zeros(basis.nrows(), basis.nrows());
        }
        let mix = CMat::from_fn(r, k, |_, _| self.complex());
        let q = (basis * mix).qr().q();
        &q * q.adjoint()
    }

    pub fn element(&mut self, algebra: &Arc<StarAlgebra>) -> AlgebraElement {
        let coeffs = CVec::from_fn(algebra.dim(), |_, _| self.complex());
        AlgebraElement::new(Arc::clone(algebra), coeffs).expect("dimension matches")
    }

    /// Positive functional shaped by the algebra's constructor recipe.
    ///
    /// Atom weights lie in `[0.1, 2]` and vanish with probability 0.3; matrix
    /// functionals are `trace(F ·)` for `F` of random rank.
    pub fn functional(&mut self, algebra: &Arc<StarAlgebra>) -> Result<Functional> {
        let spec = algebra
            .spec()
            .ok_or_else(|| FuncordError::Construction(format!("no sampler for algebra {}", algebra.label())))?
            .clone();
        let values = self.values_for(&spec);
        Functional::new(Arc::clone(algebra), values)
    }

    fn values_for(&mut self, spec: &AlgebraSpec) -> CVec {
        match spec {
            AlgebraSpec::Functions(m) => CVec::from_fn(*m, |_, _| {
                if self.coin(0.3) {
                    c(0.0, 0.0)
                } else {
                    c(self.uniform(0.1, 2.0), 0.0)
                }
            }),
            AlgebraSpec::Matrix(n) => {
                let rank = self.index(1, *n);
                let f = self.psd(*n, rank);
                dual_values(&f)
            }
            AlgebraSpec::ZeroProduct(m) => CVec::zeros(*m),
            AlgebraSpec::DirectSum(a, b) => concat(&self.values_for(a), &self.values_for(b)),
        }
    }

    /// A random disjoint part of `f`, that is `u <= f` with `u ⊥ (f - u)`.
    pub fn disjoint_part(&mut self, f: &Functional) -> Result<Functional> {
        let algebra = f.algebra();
        let spec = algebra
            .spec()
            .ok_or_else(|| FuncordError::Construction(format!("no sampler for algebra {}", algebra.label())))?
            .clone();
        let values = self.disjoint_values(&spec, f.values());
        Functional::new(Arc::clone(algebra), values)
    }

    fn disjoint_values(&mut self, spec: &AlgebraSpec, phi: &CVec) -> CVec {
        match spec {
            AlgebraSpec::Functions(_) => phi.map(|z| if self.coin(0.5) { z } else { c(0.0, 0.0) }),
            AlgebraSpec::Matrix(n) => {
                // F^{1/2} P F^{1/2} with P a projection inside ran F
                let big_f = dual_matrix(phi, *n);
                let eig = HermEigen::new(&big_f);
                let range = eig.range_basis(1e-10);
                let k = self.index(0, range.ncols());
                let p = self.projection_within(&range, k);
                let root = psd_sqrt(&eig);
                dual_values(&(&root * p * &root))
            }
            AlgebraSpec::ZeroProduct(m) => CVec::zeros(*m),
            AlgebraSpec::DirectSum(a, b) => {
                let da = a.dim();
                let left = self.disjoint_values(a, &phi.rows(0, da).into_owned());
                let right = self.disjoint_values(b, &phi.rows(da, b.dim()).into_owned());
                concat(&left, &right)
            }
        }
    }

    /// `t · (f : (n g)) / max(1, n)`, which lies below both `f` and `g`.
    pub fn common_lower_bound(&mut self, f: &Functional, g: &Functional) -> Result<Functional> {
        let n = self.uniform(0.0, 8.0);
        let t = self.uniform(0.0, 1.0);
        let tf = GnsTriple::build(f)?;
        let tg = GnsTriple::build(g)?;
        let ps = parallel_sum_triples(f.algebra(), &tf, &tg, n).value;
        Ok(ps.scale(t / n.max(1.0)))
    }
}

fn concat(a: &CVec, b: &CVec) -> CVec {
    CVec::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn psd_sqrt(eig: &HermEigen) -> CMat {
    let mut v = eig.vectors.clone();
    for (k, lam) in eig.values.iter().enumerate() {
        v.column_mut(k).scale_mut(lam.max(0.0).sqrt().sqrt());
    }
    &v * v.adjoint()
}

/// Values `φ_{p n + q} = F[q][p]` of `trace(F ·)` on matrix units.
pub fn dual_values(f: &CMat) -> CVec {
    let n = f.nrows();
    CVec::from_fn(n * n, |k, _| f[(k % n, k / n)])
}

/// Inverse of [`dual_values`].
pub fn dual_matrix(phi: &CVec, n: usize) -> CMat {
    CMat::from_fn(n, n, |q, p| phi[p * n + q])
}
