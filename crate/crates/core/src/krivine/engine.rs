use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::Zero;

use super::assemble::{assemble_lp, Assembly, Direction, KsLp};
use super::constraints::normalize_constraints;
use crate::algebra::{Backend, Polynomial, Rational, Scalar};
use crate::bernstein::to_unit_box;
use crate::error::{Error, Result};
use crate::lp::{solve_exact, solve_float, verify_certificate, write_lp, Limits, Status};
use crate::par;
use crate::report::{combine, opt_upper, CertificateStatus, Method, ReportEntry, Value};
use crate::round_model::{bound_remainder, ErrorForm, Program};

/// Which simplex to run on an assembled LP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpSolver {
    /// Exact simplex up to `exact_max_vars` variables, float otherwise.
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KsOptions {
    /// Relaxation order; defaults to deg l' (= deg f + 1).
    pub order: Option<u32>,
    pub assembly: Assembly,
    pub solver: LpSolver,
    pub exact_max_vars: usize,
    pub limits: Limits,
    /// Write both LPs in LP format next to this path (`*.lower.lp`,
    /// `*.upper.lp`).
    pub export_lp: Option<PathBuf>,
}

impl Default for KsOptions {
    fn default() -> Self {
        KsOptions {
            order: None,
            assembly: Assembly::Sparse,
            solver: LpSolver::Auto,
            exact_max_vars: 5000,
            limits: Limits::from_env(),
            export_lp: None,
        }
    }
}

/// A certified one-sided bound on l' with the weights that witness it.
#[derive(Clone, Debug, PartialEq)]
pub struct KSCertificate {
    pub direction: Direction,
    /// Certified bound (after repair).
    pub t: Rational,
    /// The solver's objective value before repair.
    pub solver_t: Rational,
    /// Nonnegative weights by LP column; see [`KsLp::column_label`].
    pub lambdas: Vec<(usize, Rational)>,
    pub residual_l1: Rational,
    /// The LP was solved by the exact simplex.
    pub exact_solve: bool,
    pub iterations: usize,
}

impl KSCertificate {
    pub fn is_exact(&self) -> bool {
        self.residual_l1.is_zero()
    }
}

/// Solve one direction of the relaxation and certify the result.
pub fn ks_bound(lp: &KsLp, direction: Direction, solver: LpSolver, limits: &Limits) -> Result<KSCertificate> {
    let problem = lp.get(direction);
    let exact = match solver {
        LpSolver::Exact => true,
        LpSolver::Float => false,
        LpSolver::Auto => problem.num_vars() <= KsOptions::default().exact_max_vars,
    };
    let res = if exact { solve_exact(problem, limits) } else { solve_float(problem, limits)? };
    match res.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::Infeasible { order: lp.order }),
        Status::Unbounded => return Err(Error::Solver("LP reported unbounded".into())),
        Status::IterationLimit => return Err(Error::Solver("iteration limit reached".into())),
        Status::TimeLimit => return Err(Error::Solver("time limit reached".into())),
    }
    let solver_t = res.t.ok_or_else(|| Error::Solver("optimal status without objective value".into()))?;
    let lambdas: Vec<(usize, Rational)> = res.lambdas.into_iter().filter(|(_, v)| *v > Rational::zero()).collect();
    let v = verify_certificate(problem, &solver_t, &lambdas);
    Ok(KSCertificate {
        direction,
        t: v.t,
        solver_t,
        lambdas,
        residual_l1: v.residual_l1,
        exact_solve: exact,
        iterations: res.iterations,
    })
}

fn export_paths(base: &Path) -> (PathBuf, PathBuf) {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "lp".into());
    let dir = base.parent().unwrap_or(Path::new(""));
    (dir.join(format!("{stem}.lower.lp")), dir.join(format!("{stem}.upper.lp")))
}

/// FPKriSten: bound l' from both sides with sparse Krivine-Stengle LPs over
/// the (normalized) input set and [-1, 1]^m, bound the remainder with
/// Taylor-model interval arithmetic, and add.
pub fn fpkristen_run<S: Scalar>(prog: &Program, ef: &ErrorForm, opts: &KsOptions) -> Result<ReportEntry> {
    if !ef.is_polynomial() {
        return Err(Error::RationalBodyUnsupported);
    }
    let start = Instant::now();
    let eps = S::from_rational_up(&ef.eps);
    let h = bound_remainder::<S>(ef, &prog.input_box())?;
    let order = opts.order.unwrap_or_else(|| ef.degree());

    let (l_lo, l_hi, lp_dims, status) = if ef.m == 0 {
        (Rational::zero(), Rational::zero(), None, CertificateStatus::Trivial)
    } else {
        let nc = normalize_constraints(prog)?;
        let s: Vec<Polynomial<Rational>> = ef.p.iter().map(|p| to_unit_box(p, prog)).collect();
        let lp = assemble_lp(&s, &nc, order, opts.assembly)?;
        if let Some(base) = &opts.export_lp {
            let (lo_path, hi_path) = export_paths(base);
            std::fs::write(&lo_path, write_lp(&lp.lower)).map_err(|e| Error::LpFormat(e.to_string()))?;
            std::fs::write(&hi_path, write_lp(&lp.upper)).map_err(|e| Error::LpFormat(e.to_string()))?;
        }
        let solver = match (opts.solver, S::BACKEND) {
            (LpSolver::Auto, Backend::Float) => LpSolver::Float,
            (LpSolver::Auto, Backend::Exact) if lp.lower.num_vars() > opts.exact_max_vars => LpSolver::Float,
            (LpSolver::Auto, Backend::Exact) => LpSolver::Exact,
            (s, _) => s,
        };
        let (lo, hi) = par::join(
            || ks_bound(&lp, Direction::Lower, solver, &opts.limits),
            || ks_bound(&lp, Direction::Upper, solver, &opts.limits),
        );
        let (lo, hi) = (lo?, hi?);
        let status =
            if lo.is_exact() && hi.is_exact() { CertificateStatus::Verified } else { CertificateStatus::Repaired };
        (lo.t, hi.t, Some(lp.dims()), status)
    };

    let lo = S::from_rational_down(&l_lo);
    let hi = S::from_rational_up(&l_hi);
    let t = combine(&eps, Some(&lo), Some(&hi), &h);
    Ok(ReportEntry {
        name: prog.name.clone(),
        method: Method::Ks,
        backend: S::BACKEND,
        n: ef.n,
        m: ef.m,
        d: ef.degree(),
        k: vec![order],
        eps: Value::upper(&eps),
        linear_lo: Value::lower(&lo),
        linear_hi: Value::upper(&hi),
        remainder_lo: Value::lower(h.lo()),
        remainder_hi: Value::upper(h.hi()),
        total: opt_upper(t.total.as_ref()),
        sharp_lower: None,
        sharp_upper: None,
        elevations: None,
        lp: lp_dims,
        convergence_gap: None,
        wall_time_secs: start.elapsed().as_secs_f64(),
        certificate: status,
    })
}
