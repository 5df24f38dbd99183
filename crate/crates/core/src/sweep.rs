//! Batch oracle checks: each case draws its inputs from its own seeded
//! stream, runs the generic pipeline and an independent oracle, and records
//! the discrepancies. Results are merged by case index.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::StarAlgebra;
use crate::error::Result;
use crate::functional::Functional;
use crate::intervals::{infimum, InfimumStatus};
use crate::lebesgue::{domination_constant, is_absolutely_continuous, regular_part};
use crate::oracles::{
    matrix_parallel_sum, matrix_regular_part, measure_infimum, measure_lebesgue, measure_parallel_sum,
    trace_dual, trend_point, Measure, TrendPoint,
};
use crate::par::{map_cases, map_cases_sequential};
use crate::parallel_sum::{is_singular, parallel_sum};
use crate::sample::Sampler;

/// Agreement bound for the commutative suite.
pub const COMMUTATIVE_TOL: f64 = 1e-7;
/// Agreement bound for the matrix suite.
pub const MATRIX_TOL: f64 = 1e-6;
/// Relative bound on `c_min(d) = d²`.
pub const TREND_REL: f64 = 0.01;
pub const TREND_DIMS: [usize; 5] = [2, 4, 8, 16, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Commutative,
    Matrix,
    Trend,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub diff: f64,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn within(name: &str, diff: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            diff,
            bound,
            pass: diff <= bound,
            note: None,
        }
    }

    fn agree(name: &str, generic: bool, oracle: bool) -> Self {
        Check {
            name: name.into(),
            diff: if generic == oracle { 0.0 } else { 1.0 },
            bound: 0.0,
            pass: generic == oracle,
            note: Some(format!("generic {generic}, oracle {oracle}")),
        }
    }

    fn noted(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub case: usize,
    pub algebra: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub tolerance: f64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub results: Vec<CaseResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<Vec<TrendPoint>>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// Largest recorded discrepancy for checks named `name`.
    pub fn worst(&self, name: &str) -> f64 {
        self.results
            .iter()
            .flat_map(|r| r.checks.iter())
            .filter(|c| c.name == name)
            .map(|c| c.diff)
            .fold(0.0, f64::max)
    }
}

pub fn run_suite(suite: Suite, cases: usize, seed: u64, tol: f64) -> SuiteReport {
    let n = effective_cases(suite, cases);
    let results = map_cases(n, |i| run_case(suite, i, seed, tol));
    assemble(suite, seed, tol, results)
}

/// Same as [`run_suite`] on a single thread.
pub fn run_suite_sequential(suite: Suite, cases: usize, seed: u64, tol: f64) -> SuiteReport {
    let n = effective_cases(suite, cases);
    let results = map_cases_sequential(n, |i| run_case(suite, i, seed, tol));
    assemble(suite, seed, tol, results)
}

fn effective_cases(suite: Suite, cases: usize) -> usize {
    match suite {
        Suite::Trend => TREND_DIMS.len(),
        _ => cases,
    }
}

fn assemble(suite: Suite, seed: u64, tol: f64, results: Vec<(CaseResult, Option<TrendPoint>)>) -> SuiteReport {
    let (results, points): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let passed = results.iter().filter(|r| r.passed()).count();
    SuiteReport {
        suite,
        seed,
        tolerance: tol,
        cases: results.len(),
        passed,
        failed: results.len() - passed,
        trend: (suite == Suite::Trend).then(|| points.into_iter().flatten().collect()),
        results,
    }
}

pub fn run_case(suite: Suite, case: usize, seed: u64, tol: f64) -> (CaseResult, Option<TrendPoint>) {
    let (algebra, outcome, point) = match suite {
        Suite::Commutative => {
            let m = if case == 0 { 2 } else { 1 + case % 8 };
            (format!("functions({m})"), commutative_case(case, m, seed, tol), None)
        }
        Suite::Matrix => {
            let n = 2 + case % 2;
            (format!("matrix({n})"), matrix_case(case, n, seed, tol), None)
        }
        Suite::Trend => {
            let d = TREND_DIMS[case % TREND_DIMS.len()];
            let point = trend_point(d);
            (format!("functions({d})"), trend_case(&point, tol), Some(point))
        }
    };
    let result = match outcome {
        Ok(checks) => CaseResult { case, algebra, checks, error: None },
        Err(e) => CaseResult {
            case,
            algebra,
            checks: Vec::new(),
            error: Some(e.to_string()),
        },
    };
    (result, point)
}

fn measure_of(f: &Functional) -> Result<Measure> {
    Measure::new(f.values().iter().map(|z| z.re).collect())
}

fn distance_to(f: &Functional, m: &Measure) -> f64 {
    f.values()
        .iter()
        .zip(&m.weights)
        .map(|(z, w)| (z - w).norm())
        .fold(0.0, f64::max)
}

/// Case 0 is the pair `(2,1)`, `(1,3)` on two atoms, where comparability
/// fails but the lattice infimum exists.
fn commutative_case(case: usize, m: usize, seed: u64, tol: f64) -> Result<Vec<Check>> {
    let (f, g) = if case == 0 {
        let alg = Arc::new(StarAlgebra::functions(2)?);
        (Functional::from_real(&alg, &[2.0, 1.0])?, Functional::from_real(&alg, &[1.0, 3.0])?)
    } else {
        let alg = Arc::new(StarAlgebra::functions(m)?);
        let mut s = Sampler::for_case(seed, case);
        (s.functional(&alg)?, s.functional(&alg)?)
    };
    let (mu, nu) = (measure_of(&f)?, measure_of(&g)?);
    let mut checks = Vec::new();

    let ps = parallel_sum(&f, &g)?.value;
    checks.push(Check::within("parallel_sum", distance_to(&ps, &measure_parallel_sum(&mu, &nu)?), COMMUTATIVE_TOL));

    let (ac, _) = measure_lebesgue(&mu, &nu)?;
    let reg = regular_part(&f, &g, tol)?;
    checks.push(Check::within("regular_part", distance_to(&reg, &ac), COMMUTATIVE_TOL));

    let oracle_singular = ac.weights.iter().all(|w| *w == 0.0);
    checks.push(Check::agree("singular", is_singular(&f, &g)?, oracle_singular));

    let meet = measure_infimum(&mu, &nu)?;
    let inf = infimum(&f, &g, tol)?;
    checks.push(match (&inf.status, &inf.value) {
        (InfimumStatus::Exists, Some(v)) => Check::within("infimum", distance_to(v, &meet), COMMUTATIVE_TOL),
        (status, _) => Check::within("infimum", 0.0, COMMUTATIVE_TOL)
            .noted(format!("generic status {status:?}; oracle {:?}", meet.weights)),
    });
    Ok(checks)
}

fn matrix_case(case: usize, n: usize, seed: u64, tol: f64) -> Result<Vec<Check>> {
    let alg = Arc::new(StarAlgebra::matrix(n)?);
    let mut s = Sampler::for_case(seed, case);
    let f = s.functional(&alg)?;
    let g = s.functional(&alg)?;
    let (big_f, big_g) = (trace_dual(&f)?, trace_dual(&g)?);
    let mut checks = Vec::new();

    let ps = trace_dual(&parallel_sum(&f, &g)?.value)?;
    let oracle_ps = matrix_parallel_sum(&big_f, &big_g)?;
    checks.push(Check::within("parallel_sum", ps.max_diff(&oracle_ps), MATRIX_TOL));

    let reg = trace_dual(&regular_part(&f, &g, tol)?)?;
    let oracle_reg = matrix_regular_part(&big_f, &big_g)?;
    checks.push(Check::within("regular_part", reg.max_diff(&oracle_reg), MATRIX_TOL));

    let scale = 1.0 + big_f.entries.camax().min(big_g.entries.camax());
    let oracle_singular = oracle_ps.entries.camax() <= 1e-8 * scale;
    checks.push(Check::agree("singular", is_singular(&f, &g)?, oracle_singular));

    let oracle_ac = oracle_reg.max_diff(&big_f) <= MATRIX_TOL;
    checks.push(Check::agree("absolutely_continuous", is_absolutely_continuous(&f, &g)?, oracle_ac));

    // bipositivity on a pair that is ordered by construction and on the raw pair
    let below = f.sub(&parallel_sum(&f, &g)?.value)?;
    checks.push(Check::agree("order_constructed", below.leq(&f)?, trace_dual(&below)?.leq(&big_f)));
    checks.push(Check::agree("order_random", f.leq(&g)?, big_f.leq(&big_g)));
    Ok(checks)
}

fn trend_case(point: &TrendPoint, tol: f64) -> Result<Vec<Check>> {
    let d = point.dim;
    let want = (d * d) as f64;
    let alg = Arc::new(StarAlgebra::functions(d)?);
    let alpha: Vec<f64> = (1..=d).map(|n| (n as f64).powi(-2)).collect();
    let beta: Vec<f64> = (1..=d).map(|n| (n as f64).powi(-4)).collect();
    let f = Functional::from_real(&alg, &alpha)?;
    let g = Functional::from_real(&alg, &beta)?;
    let generic_c = domination_constant(&f, &g)?;
    let reg = regular_part(&f, &g, tol)?;
    Ok(vec![
        Check::within("c_min", (point.c_min - want).abs(), TREND_REL * want),
        Check::within("c_min_generic", (generic_c - want).abs(), TREND_REL * want),
        Check::within("regular_equals_f", reg.distance(&f)?, 10.0 * tol),
        Check::within("regular_equals_f_oracle", point.regular_defect, MATRIX_TOL),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_small() {
        for suite in [Suite::Commutative, Suite::Matrix, Suite::Trend] {
            let r = run_suite(suite, 12, 5, 1e-9);
            assert!(r.all_passed(), "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = serde_json::to_string(&run_suite(Suite::Matrix, 6, 9, 1e-9)).unwrap();
        let b = serde_json::to_string(&run_suite_sequential(Suite::Matrix, 6, 9, 1e-9)).unwrap();
        assert_eq!(a, b);
    }
}
