//! Extreme points of order intervals and infima of pairs of functionals.

use serde::Serialize;

use crate::algebra::ensure_same;
use crate::error::{FuncordError, Result};
use crate::functional::{Functional, ORDER_TOL};
use crate::lebesgue::regular_part;
use crate::oracles::{measure_infimum, matrix_regular_part, trace_dual, trace_dual_inverse, Measure};
use crate::parallel_sum::is_singular_within;

fn scale_of(fs: &[&Functional]) -> f64 {
    fs.iter().map(|f| f.gram().scale).fold(0.0, f64::max)
}

/// `h` is extreme in `[lo, hi]` iff `(h - lo) ⊥ (hi - h)`.
pub fn is_extreme_in_interval(h: &Functional, lo: &Functional, hi: &Functional) -> Result<bool> {
    ensure_same(h.algebra(), lo.algebra())?;
    ensure_same(h.algebra(), hi.algebra())?;
    if !lo.leq(h)? {
        return Err(FuncordError::OrderViolation("lo <= h fails".into()));
    }
    if !h.leq(hi)? {
        return Err(FuncordError::OrderViolation("h <= hi fails".into()));
    }
    let floor = ORDER_TOL * (1.0 + scale_of(&[h, lo, hi]));
    is_singular_within(&h.sub(lo)?, &hi.sub(h)?, floor)
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// `g ⊥ (f - g)`
    pub disjoint_part: bool,
    /// `[g]f = g`
    pub regular_equals: bool,
    /// `‖g : (f - g)‖_∞`
    pub singular_residual: f64,
    /// `‖[g]f - g‖_∞`
    pub regular_distance: f64,
    /// Decision threshold; values in `[threshold, 10 threshold]` are undecided.
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Yes,
    Band,
    No,
}

fn verdict(x: f64, threshold: f64) -> Verdict {
    if x <= threshold {
        Verdict::Yes
    } else if x < 10.0 * threshold {
        Verdict::Band
    } else {
        Verdict::No
    }
}

/// Evaluates "`g` is a disjoint part of `f`" and "`[g]f = g`" independently.
///
/// Both use the threshold `tol (1 + scale)`. A measurement inside
/// `[threshold, 10 threshold]` is treated as undecided; a clear yes on one
/// side with a clear no on the other raises `ToleranceConflict`.
pub fn extreme_equivalences(g: &Functional, f: &Functional, tol: f64) -> Result<EquivalenceReport> {
    ensure_same(g.algebra(), f.algebra())?;
    if !g.leq(f)? {
        return Err(FuncordError::OrderViolation("g <= f fails".into()));
    }
    let scale = scale_of(&[g, f]);
    let threshold = tol * (1.0 + scale);
    let rest = f.sub(g)?;
    let floor = ORDER_TOL * (1.0 + scale);
    let tg = crate::gns::GnsTriple::build_with_floor(g, floor)?;
    let tr = crate::gns::GnsTriple::build_with_floor(&rest, floor)?;
    let singular_residual = crate::parallel_sum::parallel_sum_triples(f.algebra(), &tg, &tr, 1.0)
        .value
        .max_norm();
    let regular_distance = regular_part(f, g, tol)?.distance(g)?;

    let a = verdict(singular_residual, threshold);
    let b = verdict(regular_distance, threshold);
    if matches!((a, b), (Verdict::Yes, Verdict::No) | (Verdict::No, Verdict::Yes)) {
        return Err(FuncordError::ToleranceConflict(format!(
            "disjointness residual {singular_residual:.3e} and regular-part distance {regular_distance:.3e} disagree (threshold {threshold:.3e})"
        )));
    }
    Ok(EquivalenceReport {
        disjoint_part: singular_residual <= threshold,
        regular_equals: regular_distance <= threshold,
        singular_residual,
        regular_distance,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfimumStatus {
    Exists,
    NotExists,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Comparability of the two regular parts.
    #[default]
    Generic,
    /// Trace duality with PSD matrices; requires `matrix(n)`.
    Matrix,
    /// Atomwise minimum; requires `functions(m)`.
    Commutative,
}

#[derive(Debug, Clone)]
pub struct InfimumResult {
    pub status: InfimumStatus,
    pub value: Option<Functional>,
    pub reason: String,
    /// Both regular parts dominate each other within tolerance.
    pub equal: bool,
}

/// `f ∧ g` when the regular parts `[f]g` and `[g]f` are comparable; the
/// smaller one is the infimum.
pub fn infimum(f: &Functional, g: &Functional, tol: f64) -> Result<InfimumResult> {
    ensure_same(f.algebra(), g.algebra())?;
    let u = regular_part(g, f, tol)?;
    let v = regular_part(f, g, tol)?;
    let slack = 10.0 * tol;
    let u_below = u.leq_within(&v, slack)?;
    let v_below = v.leq_within(&u, slack)?;
    Ok(match (u_below, v_below) {
        (true, true) => InfimumResult {
            status: InfimumStatus::Exists,
            value: Some(u),
            reason: "[f]g and [g]f coincide".into(),
            equal: true,
        },
        (true, false) => InfimumResult {
            status: InfimumStatus::Exists,
            value: Some(u),
            reason: "[f]g <= [g]f".into(),
            equal: false,
        },
        (false, true) => InfimumResult {
            status: InfimumStatus::Exists,
            value: Some(v),
            reason: "[g]f <= [f]g".into(),
            equal: false,
        },
        (false, false) if f.algebra().is_full_matrix() => InfimumResult {
            status: InfimumStatus::NotExists,
            value: None,
            reason: "regular parts incomparable; on a full matrix algebra comparability is necessary".into(),
            equal: false,
        },
        (false, false) => InfimumResult {
            status: InfimumStatus::Unknown,
            value: None,
            reason: "sufficient condition failed".into(),
            equal: false,
        },
    })
}

/// [`infimum`] through the chosen backend.
pub fn infimum_with(f: &Functional, g: &Functional, tol: f64, backend: Backend) -> Result<InfimumResult> {
    ensure_same(f.algebra(), g.algebra())?;
    match backend {
        Backend::Generic => infimum(f, g, tol),
        Backend::Matrix => {
            let big_f = trace_dual(f)?;
            let big_g = trace_dual(g)?;
            let u = matrix_regular_part(&big_g, &big_f)?;
            let v = matrix_regular_part(&big_f, &big_g)?;
            let (status, value, reason, equal) = match (u.leq(&v), v.leq(&u)) {
                (true, true) => (InfimumStatus::Exists, Some(u), "[F]G and [G]F coincide", true),
                (true, false) => (InfimumStatus::Exists, Some(u), "[F]G <= [G]F", false),
                (false, true) => (InfimumStatus::Exists, Some(v), "[G]F <= [F]G", false),
                (false, false) => (
                    InfimumStatus::NotExists,
                    None,
                    "matrix regular parts incomparable",
                    false,
                ),
            };
            Ok(InfimumResult {
                status,
                value: value.map(|m| trace_dual_inverse(&m, f.algebra())).transpose()?,
                reason: reason.into(),
                equal,
            })
        }
        Backend::Commutative => {
            let alg = f.algebra();
            if !matches!(alg.spec(), Some(crate::algebra::AlgebraSpec::Functions(_))) {
                return Err(FuncordError::Construction(format!(
                    "commutative backend needs functions(m), got {}",
                    alg.label()
                )));
            }
            let weights = |h: &Functional| Measure::new(h.values().iter().map(|z| z.re).collect());
            let meet = measure_infimum(&weights(f)?, &weights(g)?)?;
            Ok(InfimumResult {
                status: InfimumStatus::Exists,
                value: Some(Functional::from_real(alg, &meet.weights)?),
                reason: "atomwise minimum of measures".into(),
                equal: false,
            })
        }
    }
}

/// `u ∧ h = [u]h` for `u` extreme in `[0, f]` and `h <= f`. When `h` is
/// extreme as well, `[u]h` is checked against `[h]u`.
pub fn extreme_meet(u: &Functional, h: &Functional, f: &Functional, tol: f64) -> Result<Functional> {
    let zero = Functional::zero(f.algebra());
    if !is_extreme_in_interval(u, &zero, f)? {
        return Err(FuncordError::OrderViolation("u is not an extreme point of [0, f]".into()));
    }
    if !h.leq(f)? {
        return Err(FuncordError::OrderViolation("h <= f fails".into()));
    }
    let meet = regular_part(h, u, tol)?;
    if is_extreme_in_interval(h, &zero, f)? {
        let other = regular_part(u, h, tol)?;
        let diff = meet.distance(&other)?;
        let bound = tol * (1.0 + scale_of(&[u, h]));
        if diff > bound {
            return Err(FuncordError::ToleranceConflict(format!(
                "[u]h and [h]u differ by {diff:.3e} (bound {bound:.3e})"
            )));
        }
    }
    Ok(meet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StarAlgebra;
    use crate::lebesgue::DEFAULT_TOL;
    use std::sync::Arc;

    fn fun(alg: &Arc<StarAlgebra>, v: &[f64]) -> Functional {
        Functional::from_real(alg, v).unwrap()
    }

    fn close(f: &Functional, want: &[f64]) {
        let w = Functional::from_real(f.algebra(), want).unwrap();
        assert!(f.distance(&w).unwrap() < 1e-6, "{:?} vs {want:?}", f.values());
    }

    #[test]
    fn extreme_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        let zero = Functional::zero(&f2);
        assert!(is_extreme_in_interval(&fun(&f2, &[1.0, 0.0]), &zero, &f).unwrap());
        assert!(!is_extreme_in_interval(&f.scale(0.5), &zero, &f).unwrap());
        assert!(is_extreme_in_interval(&zero, &zero, &f).unwrap());
        assert!(matches!(
            is_extreme_in_interval(&fun(&f2, &[2.0, 0.0]), &zero, &f),
            Err(FuncordError::OrderViolation(_))
        ));
    }

    #[test]
    fn equivalence_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        let r = extreme_equivalences(&fun(&f2, &[1.0, 0.0]), &f, DEFAULT_TOL).unwrap();
        assert!(r.disjoint_part && r.regular_equals);
        let r = extreme_equivalences(&fun(&f2, &[0.5, 0.5]), &f, DEFAULT_TOL).unwrap();
        assert!(!r.disjoint_part && !r.regular_equals);
        let r = extreme_equivalences(&Functional::zero(&f2), &fun(&f2, &[0.3, 1.7]), DEFAULT_TOL).unwrap();
        assert!(r.disjoint_part && r.regular_equals);
    }

    #[test]
    fn infimum_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[2.0, 1.0]);
        let g = fun(&f2, &[1.0, 3.0]);
        let r = infimum(&f, &g, DEFAULT_TOL).unwrap();
        assert_eq!(r.status, InfimumStatus::Unknown);
        assert_eq!(r.reason, "sufficient condition failed");
        let oracle = infimum_with(&f, &g, DEFAULT_TOL, Backend::Commutative).unwrap();
        close(oracle.value.as_ref().unwrap(), &[1.0, 1.0]);

        let r = infimum(&fun(&f2, &[1.0, 0.0]), &fun(&f2, &[0.0, 1.0]), DEFAULT_TOL).unwrap();
        assert_eq!(r.status, InfimumStatus::Exists);
        close(r.value.as_ref().unwrap(), &[0.0, 0.0]);

        let m2 = Arc::new(StarAlgebra::matrix(2).unwrap());
        let id = fun(&m2, &[1.0, 0.0, 0.0, 1.0]);
        let d = fun(&m2, &[2.0, 0.0, 0.0, 0.5]);
        assert_eq!(infimum(&id, &d, DEFAULT_TOL).unwrap().status, InfimumStatus::NotExists);
        assert_eq!(
            infimum_with(&id, &d, DEFAULT_TOL, Backend::Matrix).unwrap().status,
            InfimumStatus::NotExists
        );
    }

    #[test]
    fn comparable_regular_parts() {
        let f3 = Arc::new(StarAlgebra::functions(3).unwrap());
        let f = fun(&f3, &[1.0, 2.0, 0.0]);
        let g = fun(&f3, &[1.0, 2.0, 0.0]);
        let r = infimum(&f, &g, DEFAULT_TOL).unwrap();
        assert!(r.equal);
        close(r.value.as_ref().unwrap(), &[1.0, 2.0, 0.0]);
        assert!(matches!(
            infimum_with(&f, &g, DEFAULT_TOL, Backend::Matrix),
            Err(FuncordError::NotMatrixAlgebra(_))
        ));
    }

    #[test]
    fn extreme_meet_examples() {
        let f2 = Arc::new(StarAlgebra::functions(2).unwrap());
        let f = fun(&f2, &[1.0, 1.0]);
        let u = fun(&f2, &[1.0, 0.0]);
        close(&extreme_meet(&u, &fun(&f2, &[0.5, 0.5]), &f, DEFAULT_TOL).unwrap(), &[0.5, 0.0]);
        close(&extreme_meet(&u, &fun(&f2, &[0.0, 1.0]), &f, DEFAULT_TOL).unwrap(), &[0.0, 0.0]);
        let h = fun(&f2, &[0.3, 0.9]);
        close(&extreme_meet(&f, &h, &f, DEFAULT_TOL).unwrap(), &[0.3, 0.9]);
        assert!(extreme_meet(&f.scale(0.5), &h, &f, DEFAULT_TOL).is_err());
    }
}
