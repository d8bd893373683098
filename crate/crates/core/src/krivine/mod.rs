mod assemble;
mod constraints;
mod engine;

pub use assemble::{assemble_lp, dense_dims_formula, krivine_products, sparse_dims_formula, Assembly, Direction, KsLp};
pub use constraints::{
    build_error_box_constraints, normalize_constraints, NormalizedConstraints, ScaleEntry, SparsityPattern,
};
pub use engine::{fpkristen_run, ks_bound, KSCertificate, KsOptions, LpSolver};
