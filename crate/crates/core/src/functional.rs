//! Linear functionals on a [`StarAlgebra`], their Gram matrices and the
//! positivity order.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{ensure_same, AlgebraElement, AlgebraJson, AlgebraSpec, StarAlgebra};
use crate::cjson;
use crate::error::{FuncordError, RepresentabilityCondition, Result};
use crate::linalg::{hermitian_defect, max_abs, max_abs_vec, CMat, CVec, HermEigen, RANK_TOL};

/// Relative tolerance on Gram eigenvalues for positivity and order tests.
pub const ORDER_TOL: f64 = 1e-9;

/// Relative tolerance for functional equality on value vectors.
pub const EQUALITY_TOL: f64 = 1e-8;

/// A linear functional stored as its values `φ_i = f(b_i)` on the basis.
#[derive(Debug, Clone)]
pub struct Functional {
    algebra: Arc<StarAlgebra>,
    values: CVec,
}

impl Functional {
    pub fn new(algebra: Arc<StarAlgebra>, values: CVec) -> Result<Self> {
        if values.len() != algebra.dim() {
            return Err(FuncordError::SizeMismatch {
                expected: algebra.dim(),
                got: values.len(),
            });
        }
        Ok(Functional { algebra, values })
    }

    pub fn from_real(algebra: &Arc<StarAlgebra>, values: &[f64]) -> Result<Self> {
        let v = CVec::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(Arc::clone(algebra), v)
    }

    pub fn zero(algebra: &Arc<StarAlgebra>) -> Self {
        Functional {
            values: CVec::zeros(algebra.dim()),
            algebra: Arc::clone(algebra),
        }
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        &self.algebra
    }

    pub fn values(&self) -> &CVec {
        &self.values
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<Complex64> {
        ensure_same(&self.algebra, a.algebra())?;
        Ok(self.eval_coeffs(a.coeffs()))
    }

    /// `Σ_i x_i φ_i`.
    pub fn eval_coeffs(&self, x: &CVec) -> Complex64 {
        self.values.iter().zip(x.iter()).map(|(p, a)| p * a).sum()
    }

    /// `f(a* a)` for a coefficient vector `a`.
    pub fn eval_square(&self, x: &CVec) -> Complex64 {
        let alg = &self.algebra;
        self.eval_coeffs(&alg.mul_coeffs(&alg.star_coeffs(x), x))
    }

    pub fn scale(&self, alpha: f64) -> Functional {
        Functional {
            values: self.values.scale(alpha),
            algebra: Arc::clone(&self.algebra),
        }
    }

    pub fn add(&self, other: &Functional) -> Result<Functional> {
        ensure_same(&self.algebra, &other.algebra)?;
        Ok(Functional {
            values: &self.values + &other.values,
            algebra: Arc::clone(&self.algebra),
        })
    }

    pub fn sub(&self, other: &Functional) -> Result<Functional> {
        ensure_same(&self.algebra, &other.algebra)?;
        Ok(Functional {
            values: &self.values - &other.values,
            algebra: Arc::clone(&self.algebra),
        })
    }

    /// Max-norm of the value vector.
    pub fn max_norm(&self) -> f64 {
        max_abs_vec(&self.values)
    }

    /// Max-norm distance between value vectors.
    pub fn distance(&self, other: &Functional) -> Result<f64> {
        Ok(self.sub(other)?.max_norm())
    }

    /// Equality on the full value vector: `‖φ - ψ‖_∞ <= 1e-8 (1 + scale)`.
    pub fn approx_eq(&self, other: &Functional) -> Result<bool> {
        let scale = self.max_norm().max(other.max_norm());
        Ok(self.distance(other)? <= EQUALITY_TOL * (1.0 + scale))
    }

    /// Gram matrix of the quadratic form `a ↦ f(a* a)`.
    pub fn gram(&self) -> GramMatrix {
        let alg = &self.algebra;
        let d = alg.dim();
        let stars: Vec<CVec> = (0..d).map(|i| alg.star_coeffs(&alg.basis_vector(i))).collect();
        let mut entries = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let prod = alg.mul_coeffs(&stars[i], &alg.basis_vector(j));
                entries[(i, j)] = self.eval_coeffs(&prod);
            }
        }
        GramMatrix::from_entries(entries)
    }

    pub fn is_positive(&self) -> PositivityReport {
        let gram = self.gram();
        let tol = ORDER_TOL * (1.0 + gram.scale);
        gram.positivity(tol)
    }

    /// Positivity with an explicit absolute eigenvalue tolerance.
    pub fn is_positive_within(&self, tol: f64) -> PositivityReport {
        self.gram().positivity(tol)
    }

    /// `f <= g`, i.e. `g - f` positive, with tolerance `1e-9 (1 + max scale)`.
    pub fn leq(&self, other: &Functional) -> Result<bool> {
        self.leq_within(other, ORDER_TOL)
    }

    /// `f <= g` with relative tolerance `rel (1 + max(scale_f, scale_g))`.
    pub fn leq_within(&self, other: &Functional, rel: f64) -> Result<bool> {
        let diff = other.sub(self)?;
        let scale = self.gram().scale.max(other.gram().scale);
        Ok(diff.is_positive_within(rel * (1.0 + scale)).positive)
    }

    /// Checks the representability conditions.
    pub fn is_representable(&self) -> RepresentabilityReport {
        match crate::gns::GnsTriple::analyse(self, 0.0) {
            Ok(analysis) => RepresentabilityReport {
                representable: true,
                failed_condition: None,
                detail: None,
                hilbert_bound: Some(analysis.hilbert_bound),
            },
            Err(FuncordError::NotRepresentable { condition, detail }) => RepresentabilityReport {
                representable: false,
                failed_condition: Some(condition),
                detail: Some(detail),
                hilbert_bound: None,
            },
            Err(other) => RepresentabilityReport {
                representable: false,
                failed_condition: None,
                detail: Some(other.to_string()),
                hilbert_bound: None,
            },
        }
    }

    /// `sup { |f(a)|^2 : f(a* a) <= 1 }`.
    pub fn hilbert_bound(&self) -> Result<f64> {
        crate::gns::GnsTriple::analyse(self, 0.0).map(|a| a.hilbert_bound)
    }

    pub fn to_json(&self) -> FunctionalJson {
        FunctionalJson {
            algebra: AlgebraRef::Label(self.algebra.label().to_string()),
            values: self.values.iter().copied().collect(),
        }
    }

    /// Resolves the algebra reference of a functional file. `fallback` is used
    /// when the reference is a label that is not a constructor expression.
    pub fn from_json(json: &FunctionalJson, fallback: Option<&Arc<StarAlgebra>>) -> Result<Self> {
        let algebra = match &json.algebra {
            AlgebraRef::Inline(a) => Arc::new(StarAlgebra::from_json(a)?),
            AlgebraRef::Label(label) => match fallback {
                Some(alg) if alg.label() == label => Arc::clone(alg),
                _ => Arc::new(StarAlgebra::construct(&AlgebraSpec::parse(label)?)?),
            },
        };
        let report = algebra.validate_structure();
        if !report.is_valid() {
            return Err(FuncordError::Construction(format!("invalid algebra: {report}")));
        }
        Self::new(algebra, CVec::from_vec(json.values.clone()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Label(String),
    Inline(AlgebraJson),
}

/// `{ "algebra": "matrix(2)", "values": [[re, im], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub algebra: AlgebraRef,
    #[serde(with = "cjson::vec")]
    pub values: Vec<Complex64>,
}

/// `entries[(i, j)] = f(b_i* b_j)`, so that `f(a* a) = x^H M x` for the
/// coefficient vector `x` of `a`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub entries: CMat,
    pub scale: f64,
}

impl GramMatrix {
    pub fn from_entries(entries: CMat) -> Self {
        let scale = max_abs(&entries);
        GramMatrix { entries, scale }
    }

    pub fn quadratic(&self, x: &CVec) -> f64 {
        (x.adjoint() * &self.entries * x)[(0, 0)].re
    }

    pub fn eigen(&self) -> HermEigen {
        HermEigen::new(&self.entries)
    }

    pub fn rank(&self) -> usize {
        self.eigen().rank(RANK_TOL)
    }

    fn positivity(&self, tol: f64) -> PositivityReport {
        let defect = hermitian_defect(&self.entries);
        let eig = self.eigen();
        let min = eig.min();
        if defect > tol {
            return PositivityReport {
                positive: false,
                min_eigenvalue: min,
                hermitian_defect: defect,
                witness: None,
            };
        }
        let positive = min >= -tol;
        let witness = if positive {
            None
        } else {
            let n = eig.values.len();
            Some(eig.vectors.column(n - 1).into_owned())
        };
        PositivityReport {
            positive,
            min_eigenvalue: min,
            hermitian_defect: defect,
            witness,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub min_eigenvalue: f64,
    pub hermitian_defect: f64,
    /// Coefficients of an element `a` with `f(a* a) < 0`.
    #[serde(serialize_with = "cjson::opt_dvec::serialize")]
    pub witness: Option<CVec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentabilityReport {
    pub representable: bool,
    pub failed_condition: Option<RepresentabilityCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub hilbert_bound: Option<f64>,
}
