//! Exact and floating-point algebra: scalars, sparse polynomials,
//! rational functions, intervals and expression graphs.

pub mod expr;
pub mod interval;
pub mod multi_index;
pub mod polynomial;
pub mod rational_fn;
pub mod scalar;

pub use expr::{interval_eval, Dag, Node, NodeId};
pub use interval::Interval;
pub use multi_index::MultiIndex;
pub use polynomial::{poly_add, poly_mul, Polynomial};
pub use rational_fn::RationalFunction;
pub use scalar::{from_f64_exact, is_binary64, parse_decimal, pow2, rat, rat_int, Backend, Rational, Scalar};
