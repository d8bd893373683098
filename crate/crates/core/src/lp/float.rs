//! Double-precision LP paths. Results are uncertified; they go through
//! [`super::verify_certificate`] before being reported.

use std::time::Duration;

use super::problem::{LpProblem, Limits, Sense, SolveResult, Status};
use crate::algebra::{from_f64_exact, Rational, Scalar};
use crate::error::{Error, Result};

/// Solve with the fastest float simplex compiled in (HiGHS when the `highs`
/// feature is enabled, microlp otherwise).
pub fn solve_float(lp: &LpProblem, limits: &Limits) -> Result<SolveResult> {
    #[cfg(feature = "highs")]
    {
        solve_float_highs(lp, limits)
    }
    #[cfg(not(feature = "highs"))]
    {
        solve_float_microlp(lp, limits)
    }
}

fn exact(v: f64) -> Result<Rational> {
    from_f64_exact(v).ok_or_else(|| Error::Solver(format!("non-finite value {v} in solution")))
}

fn collect(t: f64, values: impl Iterator<Item = f64>, iterations: usize) -> Result<SolveResult> {
    let mut lambdas = Vec::new();
    for (c, v) in values.enumerate() {
        if v != 0.0 {
            lambdas.push((c, exact(v)?));
        }
    }
    Ok(SolveResult { status: Status::Optimal, t: Some(exact(t)?), lambdas, iterations })
}

#[cfg(feature = "highs")]
pub fn solve_float_highs(lp: &LpProblem, limits: &Limits) -> Result<SolveResult> {
    use highs::{ColProblem, HighsModelStatus};

    let mut pb = ColProblem::new();
    let rows: Vec<highs::Row> = lp
        .rhs
        .iter()
        .map(|b| {
            let b = b.to_f64();
            pb.add_row(b..=b)
        })
        .collect();
    let nl = lp.num_lambdas();
    let mut factors: Vec<(highs::Row, f64)> = Vec::new();
    for c in 0..nl {
        factors.clear();
        lp.for_each_in_column(c, |r, v| factors.push((rows[r], v.to_f64())));
        pb.add_column(0.0, 0.0.., &factors);
    }
    let t_factors: Vec<(highs::Row, f64)> = lp.t_col.iter().map(|(r, v)| (rows[*r], v.to_f64())).collect();
    pb.add_column::<f64, _, _, _>(1.0, .., &t_factors);

    let sense = match lp.sense {
        Sense::Maximize => highs::Sense::Maximise,
        Sense::Minimize => highs::Sense::Minimise,
    };
    let mut model = pb.try_optimise(sense).map_err(|e| Error::Solver(format!("HiGHS: {e:?}")))?;
    model.make_quiet();
    model.set_option("time_limit", limits.budget_secs);
    // Interior point with crossover is several times faster than simplex on
    // these highly degenerate relaxations; the certificate is repaired anyway.
    model.set_option("solver", "ipm");
    model.set_option("simplex_iteration_limit", limits.max_iterations.min(i32::MAX as usize) as i32);
    let solved = model.try_solve().map_err(|e| Error::Solver(format!("HiGHS: {e:?}")))?;
    let iterations = solved.simplex_iteration_count().max(0) as usize;
    match solved.status() {
        HighsModelStatus::Optimal => {}
        HighsModelStatus::Infeasible => return Ok(SolveResult::failed(Status::Infeasible, iterations)),
        HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
            return Ok(SolveResult::failed(Status::Unbounded, iterations))
        }
        HighsModelStatus::ReachedTimeLimit => return Ok(SolveResult::failed(Status::TimeLimit, iterations)),
        HighsModelStatus::ReachedIterationLimit => {
            return Ok(SolveResult::failed(Status::IterationLimit, iterations))
        }
        other => return Err(Error::Solver(format!("HiGHS: {other:?}"))),
    }
    let sol = solved.get_solution();
    let cols = sol.columns();
    collect(cols[nl], cols[..nl].iter().copied(), iterations)
}

/// The pure-Rust float path. Adequate for LPs up to a few thousand columns.
pub fn solve_float_microlp(lp: &LpProblem, limits: &Limits) -> Result<SolveResult> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

    let dir = match lp.sense {
        Sense::Maximize => OptimizationDirection::Maximize,
        Sense::Minimize => OptimizationDirection::Minimize,
    };
    let mut prob = Problem::new(dir);
    prob.set_time_limit(Duration::from_secs_f64(limits.budget_secs));
    let nl = lp.num_lambdas();
    let lam: Vec<Variable> = (0..nl).map(|_| prob.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let t = prob.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));

    let mut rows: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); lp.nrows];
    for (r, v) in &lp.t_col {
        rows[*r].push((t, v.to_f64()));
    }
    for (c, var) in lam.iter().enumerate() {
        lp.for_each_in_column(c, |r, v| rows[r].push((*var, v.to_f64())));
    }
    for (r, row) in rows.into_iter().enumerate() {
        let rhs = lp.rhs[r].to_f64();
        if row.is_empty() {
            if rhs != 0.0 {
                return Ok(SolveResult::failed(Status::Infeasible, 0));
            }
            continue;
        }
        prob.add_constraint(row, ComparisonOp::Eq, rhs);
    }

    let outcome = match prob.solve() {
        Ok(o) => o,
        Err(microlp::Error::Infeasible) => return Ok(SolveResult::failed(Status::Infeasible, 0)),
        Err(microlp::Error::Unbounded) => return Ok(SolveResult::failed(Status::Unbounded, 0)),
        Err(e) => return Err(Error::Solver(e.to_string())),
    };
    let iterations = outcome.stats().lp_iterations as usize;
    let Some(sol) = outcome.solution() else {
        return Ok(SolveResult::failed(Status::TimeLimit, iterations));
    };
    collect(sol.var_value(t), lam.iter().map(|v| sol.var_value(*v)), iterations)
}
