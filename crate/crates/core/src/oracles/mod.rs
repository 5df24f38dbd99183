//! Independent reference implementations for the two settings where the
//! order calculus is classical: finite measures (commutative algebras) and
//! positive trace-class matrices (full matrix algebras).
//!
//! Nothing here calls into [`crate::linalg`], [`crate::parallel_sum`] or
//! [`crate::lebesgue`]; pseudo-inverses go through nalgebra's SVD and limits
//! use Richardson tables instead of Aitken.

pub mod measure;
pub mod trace;
pub mod trend;

pub use measure::{measure_infimum, measure_lebesgue, measure_parallel_sum, Measure};
pub use trace::{
    matrix_parallel_sum, matrix_regular_part, trace_dual, trace_dual_inverse, TraceMatrix,
};
pub use trend::{trend_point, truncated_counterexample_trend, TrendPoint};
