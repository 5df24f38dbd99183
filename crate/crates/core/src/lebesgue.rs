//! Regular part `[g]f = sup_n f:(n g)`, the Lebesgue-type decomposition
//! `f = [g]f + (f - [g]f)` and domination tests.
//!
//! The supremum is approached along `n = 2^k`. The raw iterates converge like
//! `1/n`, so the limit is read off an Aitken Δ² extrapolation of the value
//! vectors, component by component.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::ensure_same;
use crate::error::{FuncordError, Result};
use crate::functional::Functional;
use crate::gns::GnsTriple;
use crate::linalg::{herm_norm, herm_pinv, pinv_sqrt, CMat, CVec, HermEigen, RANK_TOL, ZERO};
use crate::parallel_sum::{parallel_sum_triples, SINGULAR_TOL};

pub const DEFAULT_TOL: f64 = 1e-7;
/// Largest doubling exponent, `n = 2^40`.
pub const K_MAX: usize = 40;
/// Aitken falls back to the raw iterate when `|Δ²| < AITKEN_GUARD`.
pub const AITKEN_GUARD: f64 = 1e-14;
/// Allowed disagreement between the commutant route and the limit route.
pub const COMMUTANT_TOL: f64 = 1e-6;

/// Absolute noise level attributed to a functional computed at tolerance `tol`.
pub fn noise_floor(tol: f64, scale: f64) -> f64 {
    0.1 * tol * (1.0 + scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RegularMethod {
    /// Doubling limit with Aitken extrapolation.
    #[default]
    Limit,
    /// Closed form in the GNS space of `f + g`, checked against the limit.
    Commutant,
}

/// Outcome of the doubling iteration.
#[derive(Debug, Clone)]
pub struct RegularPart {
    pub value: Functional,
    /// Raw iterates `f:(2^k g)`, `k = 0..=iterations`.
    pub iterates: Vec<Functional>,
    pub iterations: usize,
    /// Whether any component of the returned value used an Aitken correction.
    pub extrapolated: bool,
    /// Max-norm of the last extrapolated increment.
    pub increment: f64,
}

impl RegularPart {
    pub fn raw_last(&self) -> &Functional {
        self.iterates.last().expect("at least one iterate")
    }
}

pub fn regular_part(f: &Functional, g: &Functional, tol: f64) -> Result<Functional> {
    regular_part_detailed(f, g, tol).map(|r| r.value)
}

pub fn regular_part_detailed(f: &Functional, g: &Functional, tol: f64) -> Result<RegularPart> {
    ensure_same(f.algebra(), g.algebra())?;
    if !(tol > 0.0) {
        return Err(FuncordError::InvalidDecomposition(format!("tolerance must be positive, got {tol}")));
    }
    let tf = GnsTriple::build_with_floor(f, noise_floor(tol, f.gram().scale))?;
    let tg = GnsTriple::build_with_floor(g, noise_floor(tol, g.gram().scale))?;
    let alg = f.algebra();

    let mut iterates: Vec<Functional> = Vec::new();
    let mut previous: Option<CVec> = None;
    let mut increment = f64::INFINITY;
    for k in 0..=K_MAX {
        let weight = (2.0f64).powi(k as i32);
        iterates.push(parallel_sum_triples(alg, &tf, &tg, weight).value);
        if k < 2 {
            continue;
        }
        let (acc, used) = aitken(
            iterates[k - 2].values(),
            iterates[k - 1].values(),
            iterates[k].values(),
        );
        if let Some(prev) = &previous {
            increment = (&acc - prev).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if increment < tol {
                return Ok(RegularPart {
                    value: Functional::new(Arc::clone(alg), acc)?,
                    iterates,
                    iterations: k,
                    extrapolated: used,
                    increment,
                });
            }
        }
        previous = Some(acc);
    }
    Err(FuncordError::NoConvergence {
        iterations: K_MAX,
        increment,
    })
}

/// Componentwise Aitken Δ² on three consecutive vectors; the flag reports
/// whether any component was actually corrected.
pub fn aitken(s0: &CVec, s1: &CVec, s2: &CVec) -> (CVec, bool) {
    let mut used = false;
    let out = CVec::from_iterator(
        s0.len(),
        (0..s0.len()).map(|i| {
            let d1 = s2[i] - s1[i];
            let d2 = s2[i] - 2.0 * s1[i] + s0[i];
            if d2.norm() < AITKEN_GUARD {
                s2[i]
            } else {
                used = true;
                s2[i] - d1 * d1 / d2
            }
        }),
    );
    (out, used)
}

/// `[g]f` computed inside the GNS space of `h = f + g`, where `f` and `g`
/// act as commuting positive contractions `T_f + T_g = I`; then
/// `[g]f(a) = ⟨π_h(a) T_f P ζ_h, ζ_h⟩` with `P` the range projection of `T_g`.
pub fn regular_part_commutant(f: &Functional, g: &Functional) -> Result<Functional> {
    ensure_same(f.algebra(), g.algebra())?;
    let alg = f.algebra();
    let h = f.add(g)?;
    let th = GnsTriple::build(&h)?;
    let r = th.space_dim;
    if r == 0 {
        return Ok(Functional::zero(alg));
    }
    // W^+ = W^H (W W^H)^{-1}
    let w = &th.quotient;
    let right_inv = w.adjoint() * herm_pinv(&(w * w.adjoint()), RANK_TOL);
    let t_f = right_inv.adjoint() * f.gram().entries * &right_inv;
    let t_g = right_inv.adjoint() * g.gram().entries * &right_inv;
    let defect = (&t_f + &t_g - CMat::identity(r, r)).camax();
    if defect > COMMUTANT_TOL {
        return Err(FuncordError::CrossCheckFailed {
            what: "T_f + T_g = I".into(),
            diff: defect,
            bound: COMMUTANT_TOL,
        });
    }
    let eig = HermEigen::new(&t_g);
    let range = eig.range_basis(RANK_TOL);
    let p = &range * range.adjoint();
    let op = &t_f * &p;
    let mut values = CVec::zeros(alg.dim());
    let mut recon = 0.0f64;
    for i in 0..alg.dim() {
        values[i] = th.vector_state(&(&th.rep[i] * &op));
        recon = recon.max((th.vector_state(&(&th.rep[i] * &t_f)) - f.values()[i]).norm());
    }
    let bound = 1e-7 * (1.0 + f.max_norm());
    if recon > bound {
        return Err(FuncordError::VerificationFailed { residual: recon, bound });
    }
    Functional::new(Arc::clone(alg), values)
}

/// Regular part by the chosen route. The commutant route always runs the
/// limit route too and returns their max-norm distance.
pub fn regular_part_with(
    f: &Functional,
    g: &Functional,
    tol: f64,
    method: RegularMethod,
) -> Result<(RegularPart, Option<f64>)> {
    let limit = regular_part_detailed(f, g, tol)?;
    match method {
        RegularMethod::Limit => Ok((limit, None)),
        RegularMethod::Commutant => {
            let exact = regular_part_commutant(f, g)?;
            let diff = exact.distance(&limit.value)?;
            let mut out = limit;
            out.value = exact;
            Ok((out, Some(diff)))
        }
    }
}

/// Smallest `c` with `f <= c g` on squares.
///
/// Range inclusion `ran M_f ⊆ ran M_g` is tested with absolute tolerance
/// `1e-9 (1 + scale_f)`; see [`domination_constant_within`] for noisy inputs.
pub fn domination_constant(f: &Functional, g: &Functional) -> Result<f64> {
    let scale = f.gram().scale;
    domination_constant_within(f, g, 1e-9 * (1.0 + scale))
}

pub fn domination_constant_within(f: &Functional, g: &Functional, range_tol: f64) -> Result<f64> {
    ensure_same(f.algebra(), g.algebra())?;
    let mf = f.gram().entries;
    let mg = g.gram();
    let eig_g = mg.eigen();
    // eigenvalues of g below the noise level do not count as support
    let cut_rel = if eig_g.max() > 0.0 {
        RANK_TOL.max(range_tol / eig_g.max())
    } else {
        RANK_TOL
    };
    let basis = eig_g.range_basis(cut_rel);
    let d = mf.nrows();
    let outside = CMat::identity(d, d) - &basis * basis.adjoint();
    let leak = herm_norm(&(&outside * &mf * &outside));
    if leak > range_tol {
        return Err(FuncordError::NotDominated { residual: leak });
    }
    if basis.ncols() == 0 {
        return Ok(0.0);
    }
    let root = pinv_sqrt(&eig_g, cut_rel);
    let sandwich = &root * &mf * &root;
    Ok(HermEigen::new(&sandwich).max().max(0.0))
}

/// `f ≪ g`; in finite dimensions this is domination `f <= c g`.
pub fn is_absolutely_continuous(f: &Functional, g: &Functional) -> Result<bool> {
    match domination_constant(f, g) {
        Ok(_) => Ok(true),
        Err(FuncordError::NotDominated { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub regular: Functional,
    pub singular: Functional,
    pub domination_constant: f64,
    pub iterations: usize,
    pub extrapolated: bool,
    /// `‖(singular : g)‖_∞`
    pub residual_singularity: f64,
    /// Distance between the commutant and limit routes, when both ran.
    pub commutant_divergence: Option<f64>,
    pub tolerance: f64,
}

pub fn lebesgue_decompose(f: &Functional, g: &Functional, tol: f64) -> Result<DecompositionReport> {
    lebesgue_decompose_with(f, g, tol, RegularMethod::Limit)
}

pub fn lebesgue_decompose_with(
    f: &Functional,
    g: &Functional,
    tol: f64,
    method: RegularMethod,
) -> Result<DecompositionReport> {
    let (part, divergence) = regular_part_with(f, g, tol, method)?;
    if let Some(diff) = divergence {
        if diff > COMMUTANT_TOL * (1.0 + f.max_norm()) {
            return Err(FuncordError::CrossCheckFailed {
                what: "commutant route vs doubling limit".into(),
                diff,
                bound: COMMUTANT_TOL * (1.0 + f.max_norm()),
            });
        }
    }
    let regular = part.value.clone();
    let singular = f.sub(&regular)?;
    let scale = f.gram().scale;
    let slack = 10.0 * tol * (1.0 + scale);

    let pos = singular.is_positive_within(slack);
    if !pos.positive {
        return Err(FuncordError::InvalidDecomposition(format!(
            "singular part not positive (min Gram eigenvalue {:.3e})",
            pos.min_eigenvalue
        )));
    }
    let reg_pos = regular.is_positive_within(slack);
    if !reg_pos.positive {
        return Err(FuncordError::InvalidDecomposition(format!(
            "regular part not positive (min Gram eigenvalue {:.3e})",
            reg_pos.min_eigenvalue
        )));
    }

    let floor = noise_floor(tol, scale);
    let ts = GnsTriple::build_with_floor(&singular, floor)?;
    let tg = GnsTriple::build_with_floor(g, floor)?;
    let residual_singularity = parallel_sum_triples(f.algebra(), &ts, &tg, 1.0)
        .value
        .max_norm();
    if residual_singularity > tol.max(SINGULAR_TOL * (1.0 + scale)) {
        return Err(FuncordError::InvalidDecomposition(format!(
            "singular part is not g-singular (residual {residual_singularity:.3e})"
        )));
    }
    let domination_constant = domination_constant_within(&regular, g, slack)?;
    Ok(DecompositionReport {
        regular,
        singular,
        domination_constant,
        iterations: part.iterations,
        extrapolated: part.extrapolated,
        residual_singularity,
        commutant_divergence: divergence,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniquenessCertificate {
    pub unique: bool,
    pub c: f64,
}

/// Uniqueness of the decomposition follows from `[g]f <= c g`, which always
/// holds for some finite `c` in finite dimensions.
pub fn uniqueness_certificate(f: &Functional, g: &Functional, tol: f64) -> Result<UniquenessCertificate> {
    let regular = regular_part(f, g, tol)?;
    let slack = 10.0 * tol * (1.0 + f.gram().scale);
    let c = domination_constant_within(&regular, g, slack)?;
    Ok(UniquenessCertificate { unique: true, c })
}

#[allow(dead_code)]
pub(crate) fn is_zero_functional(f: &Functional) -> bool {
    f.values().iter().all(|z| *z == ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StarAlgebra;
    use crate::linalg::c;

    fn fun(alg: &Arc<StarAlgebra>, v: &[f64]) -> Functional {
        Functional::from_real(alg, v).unwrap()
    }

    fn assert_values(f: &Functional, want: &[f64], tol: f64) {
        for (i, &w) in want.iter().enumerate() {
            assert!(
                (f.values()[i] - c(w, 0.0)).norm() <= tol,
                "component {i}: {:?} vs {want:?}",
                f.values()
            );
        }
    }

    #[test]
    fn regular_part_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        let g = fun(&f2, &[1.0, 0.0]);
        assert_values(&regular_part(&f, &g, DEFAULT_TOL).unwrap(), &[1.0, 0.0], 1e-7);
        assert_values(&regular_part(&f, &f, DEFAULT_TOL).unwrap(), &[1.0, 1.0], 1e-7);
        let zero = Functional::zero(&f2);
        assert_values(&regular_part(&f, &zero, DEFAULT_TOL).unwrap(), &[0.0, 0.0], 1e-12);
    }

    #[test]
    fn aitken_is_exact_on_geometric_tails() {
        let s = |k: i32| CVec::from_element(2, c(3.0 - 2.0 * 0.5f64.powi(k), 0.0));
        let (acc, used) = aitken(&s(3), &s(4), &s(5));
        assert!(used);
        assert!((acc[0] - c(3.0, 0.0)).norm() < 1e-12);
        // constant sequence: guard falls back to the raw value
        let (acc, used) = aitken(&s(60), &s(60), &s(60));
        assert!(!used);
        assert_eq!(acc, s(60));
    }

    #[test]
    fn decomposition_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        let g = fun(&f2, &[1.0, 0.0]);
        let rep = lebesgue_decompose(&f, &g, DEFAULT_TOL).unwrap();
        assert_values(&rep.regular, &[1.0, 0.0], 1e-7);
        assert_values(&rep.singular, &[0.0, 1.0], 1e-7);
        assert!((rep.domination_constant - 1.0).abs() < 1e-6);
        assert!(rep.extrapolated);

        let rep = lebesgue_decompose(&fun(&f2, &[1.0, 0.0]), &fun(&f2, &[0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_values(&rep.regular, &[0.0, 0.0], 1e-12);
        assert_values(&rep.singular, &[1.0, 0.0], 1e-12);

        let rep = lebesgue_decompose(&f, &f, DEFAULT_TOL).unwrap();
        assert_values(&rep.regular, &[1.0, 1.0], 1e-7);
        assert_values(&rep.singular, &[0.0, 0.0], 1e-7);
    }

    #[test]
    fn absolute_continuity_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        assert!(is_absolutely_continuous(&f, &fun(&f2, &[2.0, 1.0])).unwrap());
        let g = fun(&f2, &[1.0, 0.0]);
        assert!(!is_absolutely_continuous(&f, &g).unwrap());
        let reg = regular_part(&f, &g, DEFAULT_TOL).unwrap();
        assert!(is_absolutely_continuous(&reg, &g).unwrap());
    }

    #[test]
    fn domination_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let c1 = domination_constant(&fun(&f2, &[1.0, 2.0]), &fun(&f2, &[1.0, 1.0])).unwrap();
        assert!((c1 - 2.0).abs() < 1e-12);
        assert!(matches!(
            domination_constant(&fun(&f2, &[1.0, 0.0]), &fun(&f2, &[0.0, 1.0])),
            Err(FuncordError::NotDominated { .. })
        ));
        let f = fun(&f2, &[0.3, 0.7]);
        assert!((domination_constant(&f, &f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniqueness_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let cert = uniqueness_certificate(&fun(&f2, &[1.0, 1.0]), &fun(&f2, &[1.0, 0.0]), DEFAULT_TOL).unwrap();
        assert!(cert.unique);
        assert!((cert.c - 1.0).abs() < 1e-6);
        let cert = uniqueness_certificate(&fun(&f2, &[3.0, 1.0]), &fun(&f2, &[1.0, 1.0]), DEFAULT_TOL).unwrap();
        assert!((cert.c - 3.0).abs() < 1e-6);
        let cert = uniqueness_certificate(&fun(&f2, &[1.0, 0.0]), &fun(&f2, &[0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert!(cert.c.abs() < 1e-12);
    }

    #[test]
    fn commutant_route_matches_limit() {
        let m = Arc::new(StarAlgebra::matrix(2).unwrap());
        // F = [[1, 0.5], [0.5, 1]], G = diag(1, 0); f(e_pq) = F[q][p]
        let f = fun(&m, &[1.0, 0.5, 0.5, 1.0]);
        let g = fun(&m, &[1.0, 0.0, 0.0, 0.0]);
        let exact = regular_part_commutant(&f, &g).unwrap();
        let limit = regular_part(&f, &g, DEFAULT_TOL).unwrap();
        assert!(exact.distance(&limit).unwrap() < 1e-6, "{exact:?} vs {limit:?}");
        // [G]F for rank-one-range G is the shorted operator (1 - 0.25) e11
        assert_values(&exact, &[0.75, 0.0, 0.0, 0.0], 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        assert!(regular_part(&f, &f, 0.0).is_err());
        assert!(regular_part(&f, &f, -1.0).is_err());
    }
}
