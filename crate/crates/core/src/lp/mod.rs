//! Linear programs of the form `opt t  s.t.  Aλ + a t = b, λ >= 0`, an
//! exact simplex, a float path, and certificate repair.

mod certify;
mod exact;
mod float;
mod lpfile;
mod problem;

pub use certify::{verify_certificate, VerifiedBound};
pub use exact::solve_exact;
#[cfg(feature = "highs")]
pub use float::solve_float_highs;
pub use float::{solve_float, solve_float_microlp};
pub use lpfile::{decimal_string, parse_lp, write_lp};
pub use problem::{Column, Columns, Limits, LpProblem, Sense, SolveResult, Status, BUDGET_ENV};

use crate::algebra::Backend;
use crate::error::Result;

/// Solve with the requested backend.
pub fn solve_lp(lp: &LpProblem, backend: Backend, limits: &Limits) -> Result<SolveResult> {
    match backend {
        Backend::Exact => Ok(solve_exact(lp, limits)),
        Backend::Float => solve_float(lp, limits),
    }
}
