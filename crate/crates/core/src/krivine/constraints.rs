use num_traits::{One, Zero};

use crate::algebra::{interval_eval, rat, MultiIndex, Polynomial, Rational};
use crate::bernstein::to_unit_box;
use crate::error::{Error, Result};
use crate::round_model::Program;

/// How a user constraint was brought into `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleEntry {
    /// Index of the user constraint.
    pub constraint: usize,
    /// The constraint was divided by this (1 when no division was needed).
    pub divisor: Rational,
}

/// Constraint polynomials g_i over the unit-box coordinates with
/// `0 <= g_i <= 1` on the (scaled) domain: user constraints first, then one
/// coordinate polynomial y_i per input.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedConstraints {
    pub g: Vec<Polynomial<Rational>>,
    pub scale_log: Vec<ScaleEntry>,
}

impl NormalizedConstraints {
    pub fn p(&self) -> usize {
        self.g.len()
    }

    pub fn nvars(&self) -> usize {
        self.g.first().map_or(0, Polynomial::nvars)
    }

    /// Largest total degree among the g_i.
    pub fn max_degree(&self) -> u32 {
        self.g.iter().map(Polynomial::total_degree).max().unwrap_or(0)
    }
}

/// Upper bound of a polynomial over `[0,1]^n`: every monomial lies in
/// `[0, 1]`, so Σ max(c, 0) will do.
fn unit_box_sup(p: &Polynomial<Rational>) -> Rational {
    p.terms().map(|(_, c)| if *c > Rational::zero() { c.clone() } else { Rational::zero() }).sum()
}

/// Scale the inputs to the unit box and divide each user constraint by a
/// certified upper bound so that it takes values in `[0, 1]` on K.
///
/// The bound is the smaller of natural interval evaluation of the
/// constraint expression over the input box and the positive-coefficient sum
/// of its unit-box polynomial. Constraints whose bound is at most 1 are left
/// as they are.
pub fn normalize_constraints(prog: &Program) -> Result<NormalizedConstraints> {
    let n = prog.nvars();
    let boxes = prog.input_box::<Rational>();
    let mut g = Vec::new();
    let mut scale_log = Vec::new();
    for (i, c) in prog.constraints.iter().enumerate() {
        let unit = to_unit_box(&c.poly, prog);
        let ia = interval_eval(&prog.dag, c.expr, &boxes).map_err(|_| Error::UnboundedConstraint(i))?;
        let sup = {
            let a = ia.hi().clone();
            let b = unit_box_sup(&unit);
            if a < b {
                a
            } else {
                b
            }
        };
        let divisor = if sup > Rational::one() { sup } else { Rational::one() };
        let scaled = if divisor.is_one() { unit } else { unit.scale(&(Rational::one() / &divisor)) };
        g.push(scaled);
        scale_log.push(ScaleEntry { constraint: i, divisor });
    }
    for i in 0..n {
        g.push(Polynomial::var(n, i));
    }
    Ok(NormalizedConstraints { g, scale_log })
}

/// The maps e_j ↦ (1 + e_j)/2 sending [-1, 1] onto [0, 1], as polynomials
/// over the m error variables.
pub fn build_error_box_constraints(m: usize) -> Vec<Polynomial<Rational>> {
    let half = rat(1, 2);
    (0..m)
        .map(|j| {
            Polynomial::from_terms(m, [(MultiIndex::zero(m), half.clone()), (MultiIndex::unit(m, j), half.clone())])
        })
        .collect()
}

/// Block structure of the sparse relaxation: block j couples all inputs
/// with the single error variable e_j, and all input constraints with the
/// constraint on e_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsityPattern {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    /// I_j: variable indices (inputs 0..n, error variable n + j).
    pub vars: Vec<Vec<usize>>,
    /// J_j: constraint indices (0..p, p + j).
    pub cons: Vec<Vec<usize>>,
}

impl SparsityPattern {
    pub fn new(n: usize, m: usize, p: usize) -> Self {
        let vars = (0..m).map(|j| (0..n).chain([n + j]).collect()).collect();
        let cons = (0..m).map(|j| (0..p).chain([p + j]).collect()).collect();
        SparsityPattern { n, m, p, vars, cons }
    }

    /// The blocks cover every variable and every constraint.
    pub fn covers(&self) -> bool {
        let mut v = vec![false; self.n + self.m];
        let mut c = vec![false; self.p + self.m];
        self.vars.iter().flatten().for_each(|&i| v[i] = true);
        self.cons.iter().flatten().for_each(|&i| c[i] = true);
        self.m == 0 || v.iter().all(|x| *x) && c.iter().all(|x| *x)
    }

    /// I_{j+1} ∩ (I_1 ∪ … ∪ I_j) is contained in some I_i with i <= j.
    pub fn running_intersection(&self) -> bool {
        let mut seen: Vec<usize> = Vec::new();
        for j in 0..self.vars.len() {
            if j > 0 {
                let inter: Vec<usize> = self.vars[j].iter().copied().filter(|i| seen.contains(i)).collect();
                if !(0..j).any(|i| inter.iter().all(|v| self.vars[i].contains(v))) {
                    return false;
                }
            }
            for &v in &self.vars[j] {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        true
    }
}
