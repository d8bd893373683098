use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::Rational;
use crate::report::LpDims;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Sparse column: `(row, coefficient)` pairs with distinct rows.
pub type Column = Vec<(usize, Rational)>;

/// Column storage. Krivine-Stengle LPs repeat one local column set per
/// block with a different row mapping, which `Blocked` stores once.
#[derive(Clone, Debug)]
pub enum Columns {
    Explicit(Vec<Column>),
    Blocked {
        local: Arc<Vec<Column>>,
        /// `row_maps[b][i]` is the global row of local row `i` in block `b`.
        row_maps: Arc<Vec<Vec<usize>>>,
    },
}

/// Optimise a single free variable t subject to
/// `Σ_c A[r][c] λ_c + a[r] t = b[r]` for every row r, with all λ >= 0.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub nrows: usize,
    /// Coefficients `a` of t.
    pub t_col: Column,
    pub columns: Columns,
    pub rhs: Vec<Rational>,
}

impl LpProblem {
    pub fn new(sense: Sense, nrows: usize, t_col: Column, columns: Vec<Column>, rhs: Vec<Rational>) -> Self {
        assert_eq!(rhs.len(), nrows);
        LpProblem { sense, nrows, t_col, columns: Columns::Explicit(columns), rhs }
    }

    pub fn num_lambdas(&self) -> usize {
        match &self.columns {
            Columns::Explicit(c) => c.len(),
            Columns::Blocked { local, row_maps } => local.len() * row_maps.len(),
        }
    }

    /// t plus every λ.
    pub fn num_vars(&self) -> usize {
        self.num_lambdas() + 1
    }

    pub fn dims(&self) -> LpDims {
        LpDims { columns: self.num_vars(), rows: self.nrows }
    }

    /// Visit the nonzeros of λ column `c`.
    pub fn for_each_in_column(&self, c: usize, mut f: impl FnMut(usize, &Rational)) {
        match &self.columns {
            Columns::Explicit(cols) => cols[c].iter().for_each(|(r, v)| f(*r, v)),
            Columns::Blocked { local, row_maps } => {
                let (b, i) = (c / local.len(), c % local.len());
                let map = &row_maps[b];
                local[i].iter().for_each(|(r, v)| f(map[*r], v));
            }
        }
    }

    pub fn column(&self, c: usize) -> Column {
        let mut out = Vec::new();
        self.for_each_in_column(c, |r, v| out.push((r, v.clone())));
        out
    }

    pub fn nnz(&self) -> usize {
        let t = self.t_col.len();
        t + match &self.columns {
            Columns::Explicit(cols) => cols.iter().map(Vec::len).sum::<usize>(),
            Columns::Blocked { local, row_maps } => local.iter().map(Vec::len).sum::<usize>() * row_maps.len(),
        }
    }

    /// Exact residual `b − A λ − a t`. Entries of `lambdas` not listed are 0.
    pub fn residual(&self, t: &Rational, lambdas: &[(usize, Rational)]) -> Vec<Rational> {
        let mut rho = self.rhs.clone();
        for (r, a) in &self.t_col {
            rho[*r] -= a * t;
        }
        for (c, lam) in lambdas {
            if lam.is_zero() {
                continue;
            }
            self.for_each_in_column(*c, |r, v| rho[r] -= v * lam);
        }
        rho
    }

    /// Another LP over the same λ columns (shared, not copied).
    pub fn with_columns_of(&self, sense: Sense, t_col: Column, rhs: Vec<Rational>) -> Self {
        LpProblem { sense, nrows: self.nrows, t_col, columns: self.columns.clone(), rhs }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
}

/// Solver output. In the float path the values are the exact rationals of
/// the doubles the solver returned.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    pub t: Option<Rational>,
    /// Nonzero λ entries, by column index.
    pub lambdas: Vec<(usize, Rational)>,
    pub iterations: usize,
}

impl SolveResult {
    pub(crate) fn failed(status: Status, iterations: usize) -> Self {
        SolveResult { status, t: None, lambdas: Vec::new(), iterations }
    }
}

/// Iteration cap and wall-clock budget per LP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub max_iterations: usize,
    pub budget_secs: f64,
}

pub const BUDGET_ENV: &str = "FPCERT_SOLVER_BUDGET_SECS";

impl Default for Limits {
    fn default() -> Self {
        Limits { max_iterations: 1_000_000, budget_secs: 600.0 }
    }
}

impl Limits {
    /// Defaults, with the wall-clock budget taken from the environment when
    /// set.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Some(v) = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            if v > 0.0 {
                l.budget_secs = v;
            }
        }
        l
    }
}
