//! Order calculus of representable positive functionals on finite-dimensional
//! *-algebras: GNS triples, parallel sums, Lebesgue-type decompositions,
//! extreme points of order intervals and infima, with independent
//! measure and PSD-matrix oracles.

pub mod algebra;
pub mod cjson;
pub mod cli;
pub mod error;
pub mod functional;
pub mod gns;
pub mod linalg;
pub mod intervals;
pub mod lebesgue;
pub mod oracles;
pub mod par;
pub mod parallel_sum;
pub mod sample;
pub mod sweep;

pub use algebra::{AlgebraElement, AlgebraKind, AlgebraSpec, StarAlgebra, ValidationReport};
pub use error::{FuncordError, RepresentabilityCondition, Result};
pub use functional::{Functional, GramMatrix};
pub use gns::GnsTriple;
pub use parallel_sum::{is_singular, parallel_sum, variational_value, ParallelSumResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
