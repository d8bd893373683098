//! Input programs, the simple rounding model, and the split of the
//! roundoff error into a linear part and a remainder.

mod program;
mod remainder;
mod rounding;

pub use program::{parse_program, Constraint, Program, VarDecl};
pub use remainder::bound_remainder;
pub use rounding::{apply_rounding_model, default_eps, taylor_split, ConstantPolicy, ErrorForm, ErrorSource, RoundedProgram};
