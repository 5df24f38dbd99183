//! Finite-dimensional complex *-algebras given by structure constants.
//!
//! A basis `b_0, …, b_{d-1}` is fixed; products are `b_i b_j = Σ_k c[i][j][k] b_k`
//! and the involution is `b_i* = Σ_k s[i][k] b_k`, extended conjugate-linearly.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cjson;
use crate::error::{FuncordError, Result};
use crate::linalg::{CMat, CVec, ONE, ZERO};

/// Which constructor produced an algebra. Drives backend selection for infima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraKind {
    Matrix { n: usize },
    Functions { m: usize },
    DirectSum,
    ZeroProduct,
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebra {
    label: String,
    dim: usize,
    /// Flattened `c[i][j][k]` at `(i * dim + j) * dim + k`.
    structure: Vec<Complex64>,
    involution: CMat,
    unit: Option<CVec>,
    /// Constructor recipe, `None` for user-supplied structure data.
    spec: Option<AlgebraSpec>,
}

impl StarAlgebra {
    /// Builds an algebra from raw data, checking only shapes. Use
    /// [`StarAlgebra::validate_structure`] to check the algebraic laws.
    pub fn from_parts(
        label: impl Into<String>,
        dim: usize,
        structure: Vec<Complex64>,
        involution: CMat,
        unit: Option<CVec>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(FuncordError::Construction("dimension must be positive".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(FuncordError::Construction(format!(
                "structure tensor has {} entries, expected {}",
                structure.len(),
                dim * dim * dim
            )));
        }
        if involution.nrows() != dim || involution.ncols() != dim {
            return Err(FuncordError::Construction(format!(
                "involution is {}x{}, expected {dim}x{dim}",
                involution.nrows(),
                involution.ncols()
            )));
        }
        if let Some(u) = &unit {
            if u.len() != dim {
                return Err(FuncordError::Construction(format!(
                    "unit has {} coefficients, expected {dim}",
                    u.len()
                )));
            }
        }
        if structure.iter().chain(involution.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(FuncordError::Construction("non-finite coefficient".into()));
        }
        Ok(StarAlgebra {
            label: label.into(),
            dim,
            structure,
            involution,
            unit,
            spec: None,
        })
    }

    /// Full matrix algebra `M_n` in the basis of matrix units `e_pq`, indexed `p * n + q`.
    pub fn matrix(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FuncordError::Construction("matrix(n) needs n >= 1".into()));
        }
        let dim = n * n;
        let mut structure = vec![ZERO; dim * dim * dim];
        // e_pq e_rs = δ_qr e_ps
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    let i = p * n + q;
                    let j = q * n + s;
                    let k = p * n + s;
                    structure[(i * dim + j) * dim + k] = ONE;
                }
            }
        }
        let mut involution = CMat::zeros(dim, dim);
        let mut unit = CVec::zeros(dim);
        for p in 0..n {
            unit[p * n + p] = ONE;
            for q in 0..n {
                involution[(p * n + q, q * n + p)] = ONE;
            }
        }
        Ok(StarAlgebra {
            label: format!("matrix({n})"),
            dim,
            structure,
            involution,
            unit: Some(unit),
            spec: Some(AlgebraSpec::Matrix(n)),
        })
    }

    /// Functions on an `m`-point set, basis of point indicators.
    pub fn functions(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(FuncordError::Construction("functions(m) needs m >= 1".into()));
        }
        let mut structure = vec![ZERO; m * m * m];
        for i in 0..m {
            structure[(i * m + i) * m + i] = ONE;
        }
        Ok(StarAlgebra {
            label: format!("functions({m})"),
            dim: m,
            structure,
            involution: CMat::identity(m, m),
            unit: Some(CVec::from_element(m, ONE)),
            spec: Some(AlgebraSpec::Functions(m)),
        })
    }

    /// `n`-dimensional algebra with identically zero multiplication and identity involution.
    pub fn zero_product(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FuncordError::Construction("zero_product(n) needs n >= 1".into()));
        }
        Ok(StarAlgebra {
            label: format!("zero_product({n})"),
            dim: n,
            structure: vec![ZERO; n * n * n],
            involution: CMat::identity(n, n),
            unit: None,
            spec: Some(AlgebraSpec::ZeroProduct(n)),
        })
    }

    /// Direct sum; the basis of `a` comes first, then the basis of `b`.
    pub fn direct_sum(a: &StarAlgebra, b: &StarAlgebra) -> Result<Self> {
        for (name, alg) in [("left", a), ("right", b)] {
            let report = alg.validate_structure();
            if !report.is_valid() {
                return Err(FuncordError::Construction(format!(
                    "{name} operand of direct_sum is invalid: {report}"
                )));
            }
        }
        let (da, db) = (a.dim, b.dim);
        let dim = da + db;
        let mut structure = vec![ZERO; dim * dim * dim];
        for i in 0..da {
            for j in 0..da {
                for k in 0..da {
                    structure[(i * dim + j) * dim + k] = a.coeff(i, j, k);
                }
            }
        }
        for i in 0..db {
            for j in 0..db {
                for k in 0..db {
                    structure[((da + i) * dim + da + j) * dim + da + k] = b.coeff(i, j, k);
                }
            }
        }
        let mut involution = CMat::zeros(dim, dim);
        involution.view_mut((0, 0), (da, da)).copy_from(&a.involution);
        involution.view_mut((da, da), (db, db)).copy_from(&b.involution);
        let unit = match (&a.unit, &b.unit) {
            (Some(ua), Some(ub)) => {
                let mut u = CVec::zeros(dim);
                u.rows_mut(0, da).copy_from(ua);
                u.rows_mut(da, db).copy_from(ub);
                Some(u)
            }
            _ => None,
        };
        Ok(StarAlgebra {
            label: format!("direct_sum({},{})", a.label, b.label),
            dim,
            structure,
            involution,
            unit,
            spec: match (&a.spec, &b.spec) {
                (Some(x), Some(y)) => Some(AlgebraSpec::DirectSum(Box::new(x.clone()), Box::new(y.clone()))),
                _ => None,
            },
        })
    }

    pub fn construct(spec: &AlgebraSpec) -> Result<Self> {
        match spec {
            AlgebraSpec::Matrix(n) => Self::matrix(*n),
            AlgebraSpec::Functions(m) => Self::functions(*m),
            AlgebraSpec::ZeroProduct(n) => Self::zero_product(*n),
            AlgebraSpec::DirectSum(a, b) => {
                Self::direct_sum(&Self::construct(a)?, &Self::construct(b)?)
            }
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> AlgebraKind {
        match &self.spec {
            Some(AlgebraSpec::Matrix(n)) => AlgebraKind::Matrix { n: *n },
            Some(AlgebraSpec::Functions(m)) => AlgebraKind::Functions { m: *m },
            Some(AlgebraSpec::ZeroProduct(_)) => AlgebraKind::ZeroProduct,
            Some(AlgebraSpec::DirectSum(..)) => AlgebraKind::DirectSum,
            None => AlgebraKind::Custom,
        }
    }

    pub fn spec(&self) -> Option<&AlgebraSpec> {
        self.spec.as_ref()
    }

    pub fn unit(&self) -> Option<&CVec> {
        self.unit.as_ref()
    }

    pub fn involution_matrix(&self) -> &CMat {
        &self.involution
    }

    /// Side length `n` when this is the full matrix algebra `M_n`.
    pub fn matrix_size(&self) -> Option<usize> {
        match self.spec {
            Some(AlgebraSpec::Matrix(n)) => Some(n),
            _ => None,
        }
    }

    pub fn is_full_matrix(&self) -> bool {
        self.matrix_size().is_some()
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| (0..d).all(|k| (self.coeff(i, j, k) - self.coeff(j, i, k)).norm() == 0.0))
        })
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    fn max_coeff(&self) -> f64 {
        self.structure
            .iter()
            .chain(self.involution.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Tolerance used by structure validation: `1e-9 * (1 + max |c|)`.
    pub fn tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.max_coeff())
    }

    /// Product of two coefficient vectors.
    pub fn mul_coeffs(&self, x: &CVec, y: &CVec) -> CVec {
        let d = self.dim;
        let mut out = CVec::zeros(d);
        for i in 0..d {
            if x[i] == ZERO {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == ZERO {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// Coefficients of `x*`: `(x*)_k = Σ_i conj(x_i) s[i][k]`.
    pub fn star_coeffs(&self, x: &CVec) -> CVec {
        self.involution.transpose() * x.map(|z| z.conj())
    }

    /// Matrix of `x ↦ b_i x` on coefficient vectors.
    pub fn left_mul_matrix(&self, i: usize) -> CMat {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| self.coeff(i, j, k))
    }

    /// Coefficient vector of the basis element `b_i`.
    pub fn basis_vector(&self, i: usize) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[i] = ONE;
        v
    }

    /// Checks associativity, involutivity, anti-multiplicativity and the unit law,
    /// keeping the worst offender per invariant.
    pub fn validate_structure(&self) -> ValidationReport {
        let d = self.dim;
        let tol = self.tolerance();
        let mut report = ValidationReport::default();
        let basis: Vec<CVec> = (0..d).map(|i| self.basis_vector(i)).collect();
        let products: Vec<Vec<CVec>> = (0..d)
            .map(|i| (0..d).map(|j| self.mul_coeffs(&basis[i], &basis[j])).collect())
            .collect();

        let mut worst = (0.0f64, vec![]);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let left = self.mul_coeffs(&products[i][j], &basis[k]);
                    let right = self.mul_coeffs(&basis[i], &products[j][k]);
                    let r = (left - right).camax();
                    if r > worst.0 {
                        worst = (r, vec![i, j, k]);
                    }
                }
            }
        }
        report.push(Invariant::Associativity, worst, tol);

        let stars: Vec<CVec> = basis.iter().map(|b| self.star_coeffs(b)).collect();
        let mut worst = (0.0f64, vec![]);
        for i in 0..d {
            let r = (self.star_coeffs(&stars[i]) - &basis[i]).camax();
            if r > worst.0 {
                worst = (r, vec![i]);
            }
        }
        report.push(Invariant::Involutive, worst, tol);

        let mut worst = (0.0f64, vec![]);
        for i in 0..d {
            for j in 0..d {
                let left = self.star_coeffs(&products[i][j]);
                let right = self.mul_coeffs(&stars[j], &stars[i]);
                let r = (left - right).camax();
                if r > worst.0 {
                    worst = (r, vec![i, j]);
                }
            }
        }
        report.push(Invariant::AntiMultiplicative, worst, tol);

        if let Some(u) = &self.unit {
            let mut worst = (0.0f64, vec![]);
            for i in 0..d {
                let r = (self.mul_coeffs(u, &basis[i]) - &basis[i])
                    .camax()
                    .max((self.mul_coeffs(&basis[i], u) - &basis[i]).camax());
                if r > worst.0 {
                    worst = (r, vec![i]);
                }
            }
            report.push(Invariant::Unit, worst, tol);
        }
        report
    }

    pub fn to_json(&self) -> AlgebraJson {
        let d = self.dim;
        AlgebraJson::Explicit(ExplicitAlgebra {
            label: self.label.clone(),
            dim: d,
            structure: (0..d)
                .map(|i| (0..d).map(|j| (0..d).map(|k| self.coeff(i, j, k)).collect()).collect())
                .collect(),
            involution: (0..d)
                .map(|i| (0..d).map(|k| self.involution[(i, k)]).collect())
                .collect(),
            unit: self.unit.as_ref().map(|u| u.iter().copied().collect()),
        })
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Self> {
        match json {
            AlgebraJson::Shorthand(s) => Self::construct(&s.to_spec()?),
            AlgebraJson::Explicit(e) => {
                let d = e.dim;
                let mut structure = Vec::with_capacity(d * d * d);
                if e.structure.len() != d
                    || e.structure.iter().any(|m| m.len() != d || m.iter().any(|r| r.len() != d))
                {
                    return Err(FuncordError::Construction(format!(
                        "structure must be a {d}x{d}x{d} tensor"
                    )));
                }
                for m in &e.structure {
                    for row in m {
                        structure.extend_from_slice(row);
                    }
                }
                if e.involution.len() != d || e.involution.iter().any(|r| r.len() != d) {
                    return Err(FuncordError::Construction(format!(
                        "involution must be {d}x{d}"
                    )));
                }
                let involution = CMat::from_fn(d, d, |i, k| e.involution[i][k]);
                let unit = e.unit.as_ref().map(|u| CVec::from_vec(u.clone()));
                let mut alg = Self::from_parts(e.label.clone(), d, structure, involution, unit)?;
                // explicit data that happens to match a constructor keeps its tag
                if let Ok(spec) = AlgebraSpec::parse(&e.label) {
                    if let Ok(reference) = Self::construct(&spec) {
                        if reference.structure == alg.structure
                            && reference.involution == alg.involution
                            && reference.unit == alg.unit
                        {
                            alg.spec = reference.spec;
                        }
                    }
                }
                Ok(alg)
            }
        }
    }
}

impl fmt::Display for StarAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.label, self.dim)
    }
}

/// Constructor recipe, also the grammar of constructor labels such as
/// `direct_sum(functions(2),matrix(2))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraSpec {
    Matrix(usize),
    Functions(usize),
    ZeroProduct(usize),
    DirectSum(Box<AlgebraSpec>, Box<AlgebraSpec>),
}

impl AlgebraSpec {
    pub fn dim(&self) -> usize {
        match self {
            AlgebraSpec::Matrix(n) => n * n,
            AlgebraSpec::Functions(m) | AlgebraSpec::ZeroProduct(m) => *m,
            AlgebraSpec::DirectSum(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        let s: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        let (spec, rest) = Self::parse_prefix(&s)?;
        if !rest.is_empty() {
            return Err(FuncordError::Construction(format!("trailing input in label {label:?}")));
        }
        Ok(spec)
    }

    fn parse_prefix(s: &str) -> Result<(Self, &str)> {
        let bad = || FuncordError::Construction(format!("cannot parse algebra label {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        let name = &s[..open];
        let body = &s[open + 1..];
        if name == "direct_sum" {
            let (left, rest) = Self::parse_prefix(body)?;
            let rest = rest.strip_prefix(',').ok_or_else(bad)?;
            let (right, rest) = Self::parse_prefix(rest)?;
            let rest = rest.strip_prefix(')').ok_or_else(bad)?;
            return Ok((AlgebraSpec::DirectSum(Box::new(left), Box::new(right)), rest));
        }
        let close = body.find(')').ok_or_else(bad)?;
        let n: usize = body[..close].parse().map_err(|_| bad())?;
        let rest = &body[close + 1..];
        let spec = match name {
            "matrix" => AlgebraSpec::Matrix(n),
            "functions" => AlgebraSpec::Functions(n),
            "zero_product" => AlgebraSpec::ZeroProduct(n),
            _ => return Err(bad()),
        };
        Ok((spec, rest))
    }
}

/// Element of a particular algebra.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Arc<StarAlgebra>,
    coeffs: CVec,
}

impl AlgebraElement {
    pub fn new(algebra: Arc<StarAlgebra>, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != algebra.dim() {
            return Err(FuncordError::SizeMismatch {
                expected: algebra.dim(),
                got: coeffs.len(),
            });
        }
        Ok(AlgebraElement { algebra, coeffs })
    }

    pub fn basis(algebra: &Arc<StarAlgebra>, i: usize) -> Self {
        AlgebraElement {
            coeffs: algebra.basis_vector(i),
            algebra: Arc::clone(algebra),
        }
    }

    pub fn algebra(&self) -> &Arc<StarAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &CVec {
        &self.coeffs
    }

    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        ensure_same(&self.algebra, &other.algebra)?;
        Ok(AlgebraElement {
            coeffs: self.algebra.mul_coeffs(&self.coeffs, &other.coeffs),
            algebra: Arc::clone(&self.algebra),
        })
    }

    pub fn involute(&self) -> AlgebraElement {
        AlgebraElement {
            coeffs: self.algebra.star_coeffs(&self.coeffs),
            algebra: Arc::clone(&self.algebra),
        }
    }

    /// `αx + βy`.
    pub fn combine(&self, alpha: Complex64, other: &AlgebraElement, beta: Complex64) -> Result<Self> {
        ensure_same(&self.algebra, &other.algebra)?;
        Ok(AlgebraElement {
            coeffs: self.coeffs.map(|z| z * alpha) + other.coeffs.map(|z| z * beta),
            algebra: Arc::clone(&self.algebra),
        })
    }
}

pub(crate) fn ensure_same(a: &Arc<StarAlgebra>, b: &Arc<StarAlgebra>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(FuncordError::AlgebraMismatch {
            left: a.label().to_string(),
            right: b.label().to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Associativity,
    Involutive,
    AntiMultiplicative,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, invariant: Invariant, worst: (f64, Vec<usize>), tol: f64) {
        if worst.0 > tol {
            self.violations.push(Violation {
                invariant,
                indices: worst.1,
                residual: worst.0,
            });
        }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, invariant: Invariant) -> bool {
        self.violations.iter().any(|v| v.invariant == invariant)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?} at {:?} (residual {:.3e})", v.invariant, v.indices, v.residual))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Algebra file: either explicit structure data or a constructor shorthand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraJson {
    Shorthand(ShorthandAlgebra),
    Explicit(ExplicitAlgebra),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplicitAlgebra {
    pub label: String,
    pub dim: usize,
    #[serde(with = "cjson::tensor3")]
    pub structure: Vec<Vec<Vec<Complex64>>>,
    #[serde(with = "cjson::mat")]
    pub involution: Vec<Vec<Complex64>>,
    #[serde(default, with = "cjson::opt_vec", skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<Complex64>>,
}

/// `{ "kind": "matrix", "n": 2 }`, `{ "kind": "functions", "n": 3 }`,
/// `{ "kind": "direct_sum", "left": {...}, "right": {...} }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShorthandAlgebra {
    pub kind: String,
    #[serde(default, alias = "m", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Box<AlgebraJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Box<AlgebraJson>>,
}

impl ShorthandAlgebra {
    fn to_spec(&self) -> Result<AlgebraSpec> {
        let size = || {
            self.n.ok_or_else(|| {
                FuncordError::Construction(format!("shorthand {:?} needs \"n\"", self.kind))
            })
        };
        let operand = |side: &Option<Box<AlgebraJson>>, name: &str| -> Result<AlgebraSpec> {
            match side.as_deref() {
                Some(AlgebraJson::Shorthand(s)) => s.to_spec(),
                Some(AlgebraJson::Explicit(e)) => AlgebraSpec::parse(&e.label),
                None => Err(FuncordError::Construction(format!("direct_sum needs \"{name}\""))),
            }
        };
        match self.kind.as_str() {
            "matrix" => Ok(AlgebraSpec::Matrix(size()?)),
            "functions" => Ok(AlgebraSpec::Functions(size()?)),
            "zero_product" => Ok(AlgebraSpec::ZeroProduct(size()?)),
            "direct_sum" => Ok(AlgebraSpec::DirectSum(
                Box::new(operand(&self.left, "left")?),
                Box::new(operand(&self.right, "right")?),
            )),
            other => Err(FuncordError::Construction(format!("unknown algebra kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn elem(alg: &Arc<StarAlgebra>, v: &[Complex64]) -> AlgebraElement {
        AlgebraElement::new(Arc::clone(alg), CVec::from_vec(v.to_vec())).unwrap()
    }

    #[test]
    fn matrix_units_multiply() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        // indices: e11=0, e12=1, e21=2, e22=3
        let e11 = AlgebraElement::basis(&m, 0);
        let e12 = AlgebraElement::basis(&m, 1);
        let e21 = AlgebraElement::basis(&m, 2);
        assert_eq!(e11.multiply(&e12).unwrap().coeffs(), e12.coeffs());
        assert_eq!(e12.multiply(&e21).unwrap().coeffs(), e11.coeffs());
        assert_eq!(e12.involute().coeffs(), e21.coeffs());
    }

    #[test]
    fn function_indicators_multiply() {
        let f = Arc::new(StarAlgebra::functions(2).unwrap());
        let d1 = AlgebraElement::basis(&f, 0);
        let d2 = AlgebraElement::basis(&f, 1);
        assert_eq!(d1.multiply(&d2).unwrap().coeffs(), &CVec::zeros(2));
        assert_eq!(d1.multiply(&d1).unwrap().coeffs(), d1.coeffs());
        let sum = elem(&f, &[ONE, ONE]);
        let diff = elem(&f, &[ONE, -ONE]);
        assert_eq!(sum.multiply(&diff).unwrap().coeffs(), diff.coeffs());
    }

    #[test]
    fn zero_product_squares_vanish() {
        let z = Arc::new(StarAlgebra::zero_product(1).unwrap());
        let b = AlgebraElement::basis(&z, 0);
        assert_eq!(b.multiply(&b).unwrap().coeffs(), &CVec::zeros(1));
    }

    #[test]
    fn involution_is_conjugate_linear() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        let x = elem(&m, &[ZERO, c(0.0, 1.0), ZERO, ZERO]);
        assert_eq!(x.involute().coeffs(), elem(&m, &[ZERO, ZERO, c(0.0, -1.0), ZERO]).coeffs());
        let f = Arc::new(StarAlgebra::functions(2).unwrap());
        let y = elem(&f, &[c(1.0, 1.0), ZERO]);
        assert_eq!(y.involute().coeffs()[0], c(1.0, -1.0));
        assert_eq!(y.involute().involute().coeffs(), y.coeffs());
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let f2 = StarAlgebra::functions(2).unwrap();
        let m2 = StarAlgebra::matrix(2).unwrap();
        let s = Arc::new(StarAlgebra::direct_sum(&f2, &m2).unwrap());
        assert_eq!(s.dim(), 6);
        assert!(s.validate_structure().is_valid());
        // δ1 · e12 = 0 across blocks; e12 · e21 = e11 inside the matrix block
        let d1 = AlgebraElement::basis(&s, 0);
        let e12 = AlgebraElement::basis(&s, 3);
        let e21 = AlgebraElement::basis(&s, 4);
        assert_eq!(d1.multiply(&e12).unwrap().coeffs(), &CVec::zeros(6));
        assert_eq!(e12.multiply(&e21).unwrap().coeffs(), AlgebraElement::basis(&s, 2).coeffs());
        assert_eq!(e12.involute().coeffs(), e21.coeffs());
        let unit = s.unit().unwrap();
        assert_eq!(unit.iter().filter(|z| **z == ONE).count(), 4);
        assert_eq!(s.label(), "direct_sum(functions(2),matrix(2))");
    }

    #[test]
    fn constructors_validate() {
        for alg in [
            StarAlgebra::matrix(3).unwrap(),
            StarAlgebra::functions(4).unwrap(),
            StarAlgebra::zero_product(2).unwrap(),
        ] {
            assert!(alg.validate_structure().is_valid(), "{alg}");
        }
    }

    #[test]
    fn perturbed_structure_is_flagged() {
        let f = StarAlgebra::functions(2).unwrap();
        let mut structure = f.structure.clone();
        structure[0] += c(1e-3, 0.0);
        let bad = StarAlgebra::from_parts(
            "bad",
            2,
            structure,
            f.involution.clone(),
            f.unit.clone(),
        )
        .unwrap();
        let report = bad.validate_structure();
        assert!(report.has(Invariant::Unit) || report.has(Invariant::Associativity));
        let unit = report.violations.iter().find(|v| v.invariant == Invariant::Unit).unwrap();
        assert_eq!(unit.indices, vec![0]);
        assert!((unit.residual - 1e-3).abs() < 1e-12);
    }

    #[test]
    fn non_involutive_is_flagged() {
        let f = StarAlgebra::functions(2).unwrap();
        let inv = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), ZERO, ZERO, ONE]);
        let bad = StarAlgebra::from_parts("bad", 2, f.structure.clone(), inv, None).unwrap();
        assert!(bad.validate_structure().has(Invariant::Involutive));
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(StarAlgebra::matrix(0).is_err());
        assert!(StarAlgebra::functions(0).is_err());
        assert!(StarAlgebra::zero_product(0).is_err());
        assert!(StarAlgebra::from_parts("x", 2, vec![ZERO; 7], CMat::identity(2, 2), None).is_err());
    }

    #[test]
    fn labels_parse_back() {
        for label in ["matrix(3)", "functions(2)", "zero_product(1)", "direct_sum(functions(2), matrix(2))"] {
            let spec = AlgebraSpec::parse(label).unwrap();
            let alg = StarAlgebra::construct(&spec).unwrap();
            assert_eq!(AlgebraSpec::parse(alg.label()).unwrap(), spec);
        }
        assert!(AlgebraSpec::parse("quaternions(1)").is_err());
        assert!(AlgebraSpec::parse("matrix(2)x").is_err());
    }

    #[test]
    fn json_shorthand_and_explicit() {
        let j: AlgebraJson = serde_json::from_str(r#"{"kind":"matrix","n":2}"#).unwrap();
        let a = StarAlgebra::from_json(&j).unwrap();
        assert!(a.is_full_matrix());
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back: AlgebraJson = serde_json::from_str(&text).unwrap();
        let b = StarAlgebra::from_json(&back).unwrap();
        assert_eq!(a, b);
        let j: AlgebraJson = serde_json::from_str(
            r#"{"kind":"direct_sum","left":{"kind":"functions","m":2},"right":{"kind":"matrix","n":2}}"#,
        )
        .unwrap();
        assert_eq!(StarAlgebra::from_json(&j).unwrap().dim(), 6);
    }
}
