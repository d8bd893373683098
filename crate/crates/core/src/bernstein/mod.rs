//! Bernstein expansions on the unit box and the FPBern engine.

mod bounds;
mod engine;
mod expansion;

pub use bounds::{
    convergence_bound, linear_error_bound_poly, linear_error_bound_rational, linear_error_sums,
    lipschitz_constant, RationalLinearBound,
};
pub use engine::{fpbern_run, to_unit_box, BernOptions};
pub use expansion::{
    bernstein_coeffs, bernstein_coeffs_direct, degree_elevate, enclosure, rational_enclosure, BernBound,
    BernsteinExpansion,
};
