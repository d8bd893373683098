//! Two-phase revised primal simplex over exact rationals.
//!
//! A dense basis inverse is kept and updated by elementary row operations;
//! Bland's rule (smallest eligible index for both the entering and the
//! leaving variable) rules out cycling. Intended as the reference solver for
//! small and medium LPs; there is no scaling or presolve beyond dropping
//! rows that are identically zero.

use std::time::Instant;

use num_traits::{One, Signed, Zero};

use super::problem::{Column, LpProblem, Limits, Sense, SolveResult, Status};
use crate::algebra::Rational;

struct Tableau {
    /// Columns of all variables: λ, t⁺, t⁻, then one artificial per row.
    cols: Vec<Column>,
    n_struct: usize,
    b: Vec<Rational>,
    binv: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    xb: Vec<Rational>,
    iterations: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    Limit(Status),
}

impl Tableau {
    fn ftran(&self, col: &Column) -> Vec<Rational> {
        let m = self.b.len();
        let mut u = vec![Rational::zero(); m];
        for (r, row) in self.binv.iter().enumerate() {
            let mut acc = Rational::zero();
            for (k, v) in col {
                let bk = &row[*k];
                if !bk.is_zero() {
                    acc += bk * v;
                }
            }
            u[r] = acc;
        }
        debug_assert_eq!(u.len(), m);
        u
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let m = self.b.len();
        let mut y = vec![Rational::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = &cost[j];
            if c.is_zero() {
                continue;
            }
            for (k, v) in self.binv[r].iter().enumerate() {
                if !v.is_zero() {
                    y[k] += c * v;
                }
            }
        }
        y
    }

    fn pivot(&mut self, p: usize, q: usize, u: &[Rational]) {
        let piv = u[p].clone();
        let theta = &self.xb[p] / &piv;
        for (r, ur) in u.iter().enumerate() {
            if r != p && !ur.is_zero() {
                let d = ur * &theta;
                self.xb[r] -= d;
            }
        }
        self.xb[p] = theta;
        let inv = Rational::one() / &piv;
        for v in self.binv[p].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let prow = self.binv[p].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        for (r, ur) in u.iter().enumerate() {
            if r == p || ur.is_zero() {
                continue;
            }
            let row = &mut self.binv[r];
            for &k in &nz {
                row[k] -= ur * &prow[k];
            }
        }
        self.in_basis[self.basis[p]] = false;
        self.in_basis[q] = true;
        self.basis[p] = q;
        self.iterations += 1;
    }

    /// Minimise `cost·x` from the current basic feasible solution. Only the
    /// first `enter_limit` variables may enter the basis.
    fn run(&mut self, cost: &[Rational], enter_limit: usize, limits: &Limits, start: Instant) -> Outcome {
        loop {
            if self.iterations >= limits.max_iterations {
                return Outcome::Limit(Status::IterationLimit);
            }
            if start.elapsed().as_secs_f64() > limits.budget_secs {
                return Outcome::Limit(Status::TimeLimit);
            }
            let y = self.duals(cost);
            let entering = (0..enter_limit).find(|&j| {
                if self.in_basis[j] {
                    return false;
                }
                let mut d = cost[j].clone();
                for (k, v) in &self.cols[j] {
                    if !y[*k].is_zero() {
                        d -= &y[*k] * v;
                    }
                }
                d.is_negative()
            });
            let Some(q) = entering else {
                return Outcome::Optimal;
            };
            let u = self.ftran(&self.cols[q]);
            let mut leave: Option<(usize, Rational)> = None;
            for (r, ur) in u.iter().enumerate() {
                if !ur.is_positive() {
                    continue;
                }
                let ratio = &self.xb[r] / ur;
                let better = match &leave {
                    None => true,
                    Some((p, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*p]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return Outcome::Unbounded;
            };
            self.pivot(p, q, &u);
        }
    }
}

/// Solve `lp` exactly. Every status is definitive except the two limits.
pub fn solve_exact(lp: &LpProblem, limits: &Limits) -> SolveResult {
    let start = Instant::now();
    let nl = lp.num_lambdas();
    let mut cols: Vec<Column> = (0..nl).map(|c| lp.column(c)).collect();
    cols.push(lp.t_col.clone());
    cols.push(lp.t_col.iter().map(|(r, v)| (*r, -v)).collect());
    let n_struct = nl + 2;

    // Drop empty rows; a nonzero right-hand side there is a contradiction.
    let mut used = vec![false; lp.nrows];
    for c in &cols {
        for (r, _) in c {
            used[*r] = true;
        }
    }
    let mut row_of = vec![usize::MAX; lp.nrows];
    let mut b = Vec::new();
    let mut sign = Vec::new();
    for r in 0..lp.nrows {
        if used[r] {
            row_of[r] = b.len();
            let neg = lp.rhs[r].is_negative();
            sign.push(neg);
            b.push(if neg { -&lp.rhs[r] } else { lp.rhs[r].clone() });
        } else if !lp.rhs[r].is_zero() {
            return SolveResult::failed(Status::Infeasible, 0);
        }
    }
    let m = b.len();
    for c in cols.iter_mut() {
        for (r, v) in c.iter_mut() {
            *r = row_of[*r];
            if sign[*r] {
                *v = -v.clone();
            }
        }
        c.sort_by_key(|(r, _)| *r);
    }
    for r in 0..m {
        cols.push(vec![(r, Rational::one())]);
    }
    let total = cols.len();
    let mut binv = vec![vec![Rational::zero(); m]; m];
    for (r, row) in binv.iter_mut().enumerate() {
        row[r] = Rational::one();
    }
    let mut in_basis = vec![false; total];
    for r in 0..m {
        in_basis[n_struct + r] = true;
    }
    let mut tab = Tableau {
        cols,
        n_struct,
        xb: b.clone(),
        b,
        binv,
        basis: (n_struct..n_struct + m).collect(),
        in_basis,
        iterations: 0,
    };

    // Phase 1: minimise the sum of artificials.
    let mut cost1 = vec![Rational::zero(); total];
    for c in cost1.iter_mut().skip(n_struct) {
        *c = Rational::one();
    }
    match tab.run(&cost1, n_struct, limits, start) {
        Outcome::Optimal => {}
        Outcome::Unbounded => unreachable!("phase 1 objective is bounded below by 0"),
        Outcome::Limit(s) => return SolveResult::failed(s, tab.iterations),
    }
    let infeas: Rational =
        tab.basis.iter().zip(&tab.xb).filter(|(j, _)| **j >= tab.n_struct).map(|(_, x)| x.clone()).sum();
    if infeas.is_positive() {
        return SolveResult::failed(Status::Infeasible, tab.iterations);
    }
    // Drive zero-level artificials out where possible; rows where that is
    // impossible are redundant and keep their artificial at 0.
    for p in 0..m {
        if tab.basis[p] < tab.n_struct {
            continue;
        }
        let row = tab.binv[p].clone();
        let q = (0..tab.n_struct).find(|&j| {
            !tab.in_basis[j] && {
                let mut acc = Rational::zero();
                for (k, v) in &tab.cols[j] {
                    if !row[*k].is_zero() {
                        acc += &row[*k] * v;
                    }
                }
                !acc.is_zero()
            }
        });
        if let Some(q) = q {
            let u = tab.ftran(&tab.cols[q]);
            tab.pivot(p, q, &u);
        }
    }

    // Phase 2: minimise ∓t.
    let mut cost2 = vec![Rational::zero(); total];
    let (tp, tm) = match lp.sense {
        Sense::Maximize => (-Rational::one(), Rational::one()),
        Sense::Minimize => (Rational::one(), -Rational::one()),
    };
    cost2[nl] = tp;
    cost2[nl + 1] = tm;
    match tab.run(&cost2, n_struct, limits, start) {
        Outcome::Optimal => {}
        Outcome::Unbounded => return SolveResult::failed(Status::Unbounded, tab.iterations),
        Outcome::Limit(s) => return SolveResult::failed(s, tab.iterations),
    }
    let mut t = Rational::zero();
    let mut lambdas = Vec::new();
    for (&j, x) in tab.basis.iter().zip(&tab.xb) {
        if x.is_zero() {
            continue;
        }
        if j < nl {
            lambdas.push((j, x.clone()));
        } else if j == nl {
            t += x;
        } else if j == nl + 1 {
            t -= x;
        }
    }
    lambdas.sort_by_key(|(j, _)| *j);
    SolveResult { status: Status::Optimal, t: Some(t), lambdas, iterations: tab.iterations }
}
