use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::program::Program;
use crate::algebra::{is_binary64, pow2, Dag, Node, NodeId, Polynomial, Rational, RationalFunction};
use crate::error::{Error, Result};

/// Which numeric literals are treated as rounded on entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantPolicy {
    /// Constants are exact.
    None,
    /// Constants that are not binary64 numbers get an error variable.
    #[default]
    NonRepresentable,
    /// Every nonzero constant gets an error variable.
    All,
}

impl std::str::FromStr for ConstantPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(ConstantPolicy::None),
            "nonrep" | "non-representable" => Ok(ConstantPolicy::NonRepresentable),
            "all" => Ok(ConstantPolicy::All),
            other => Err(format!("unknown constant policy `{other}` (expected none, nonrep or all)")),
        }
    }
}

/// Where an error variable came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ErrorSource {
    Variable { index: usize, name: String },
    Constant { value: String },
    Operation { op: String },
}

impl fmt::Display for ErrorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorSource::Variable { name, .. } => write!(f, "variable {name}"),
            ErrorSource::Constant { value } => write!(f, "constant {value}"),
            ErrorSource::Operation { op } => write!(f, "operation {op}"),
        }
    }
}

/// The program under the rounding model: a graph over `x_0..x_{n-1}`
/// followed by the error variables `e_0..e_{m-1}` (graph variables
/// `n..n+m`).
#[derive(Clone, Debug)]
pub struct RoundedProgram {
    pub n: usize,
    pub m: usize,
    pub dag: Dag,
    pub root: NodeId,
    pub sources: Vec<ErrorSource>,
    /// Error variables introduced at each source node, in the order they
    /// are applied.
    node_errors: HashMap<NodeId, Vec<usize>>,
}

impl RoundedProgram {
    pub fn errors_at(&self, node: NodeId) -> &[usize] {
        self.node_errors.get(&node).map_or(&[], Vec::as_slice)
    }
}

fn op_name(node: &Node) -> &'static str {
    match node {
        Node::Add(..) => "+",
        Node::Sub(..) => "-",
        Node::Mul(..) | Node::Pow(..) => "*",
        Node::Div(..) => "/",
        Node::Neg(..) => "neg",
        Node::Var(_) | Node::Const(_) => "",
    }
}

/// Build f̂(x, e): every variable read becomes `x_i (1 + e_v(i))` with one
/// shared error variable per program variable, rounded constants become
/// `c (1 + e_c)`, and every operation (including negation) is wrapped in
/// `(.)(1 + e_op)`. Powers are expanded into left-associated products, one
/// error variable per multiplication. Structurally identical subexpressions
/// share their rounded node and error variables.
pub fn apply_rounding_model(prog: &Program, policy: ConstantPolicy) -> Result<RoundedProgram> {
    let n = prog.nvars();
    let src = &prog.dag;
    let mut dag = Dag::new();
    let one = dag.constant(Rational::one());
    let mut sources = Vec::new();
    let mut node_errors: HashMap<NodeId, Vec<usize>> = HashMap::new();
    let mut map: HashMap<NodeId, NodeId> = HashMap::new();

    let fresh = |dag: &mut Dag, sources: &mut Vec<ErrorSource>, s: ErrorSource| -> (usize, NodeId) {
        let j = sources.len();
        sources.push(s);
        let e = dag.var(n + j);
        (j, dag.add(one, e))
    };

    for id in src.reachable(prog.body) {
        let node = src.node(id).clone();
        let mut errs = Vec::new();
        let out = match node {
            Node::Var(i) => {
                let x = dag.var(i);
                let (j, f) = fresh(&mut dag, &mut sources, ErrorSource::Variable { index: i, name: prog.vars[i].name.clone() });
                errs.push(j);
                dag.mul(x, f)
            }
            Node::Const(ref c) => {
                let k = dag.constant(c.clone());
                let rounded = !c.is_zero()
                    && match policy {
                        ConstantPolicy::None => false,
                        ConstantPolicy::NonRepresentable => !is_binary64(c),
                        ConstantPolicy::All => true,
                    };
                if rounded {
                    let (j, f) = fresh(&mut dag, &mut sources, ErrorSource::Constant { value: c.to_string() });
                    errs.push(j);
                    dag.mul(k, f)
                } else {
                    k
                }
            }
            Node::Pow(a, k) => {
                let base = map[&a];
                let mut acc = base;
                for _ in 1..k {
                    let prod = dag.mul(acc, base);
                    let (j, f) = fresh(&mut dag, &mut sources, ErrorSource::Operation { op: "*".into() });
                    errs.push(j);
                    acc = dag.mul(prod, f);
                }
                acc
            }
            ref op => {
                let exact = match *op {
                    Node::Add(a, b) => dag.add(map[&a], map[&b]),
                    Node::Sub(a, b) => dag.sub(map[&a], map[&b]),
                    Node::Mul(a, b) => dag.mul(map[&a], map[&b]),
                    Node::Div(a, b) => dag.div(map[&a], map[&b]),
                    Node::Neg(a) => dag.neg(map[&a]),
                    _ => unreachable!(),
                };
                let (j, f) = fresh(&mut dag, &mut sources, ErrorSource::Operation { op: op_name(op).into() });
                errs.push(j);
                dag.mul(exact, f)
            }
        };
        if !errs.is_empty() {
            node_errors.insert(id, errs);
        }
        map.insert(id, out);
    }
    let root = map[&prog.body];
    Ok(RoundedProgram { n, m: sources.len(), dag, root, sources, node_errors })
}

/// The decomposition r = f̂ − f = l + h with l = Σ s_j e_j.
///
/// Every s_j is stored as `p_j / q²` with one common `q`; for polynomial
/// programs `q = 1`. The remainder h is represented implicitly by the
/// rounded graph (h = f̂ − f − l), which is what the interval bound walks.
#[derive(Clone, Debug)]
pub struct ErrorForm {
    pub n: usize,
    pub m: usize,
    pub f: RationalFunction<Rational>,
    pub q: Polynomial<Rational>,
    pub p: Vec<Polynomial<Rational>>,
    pub eps: Rational,
    pub sources: Vec<ErrorSource>,
    pub rounded: RoundedProgram,
}

/// Default unit roundoff for binary64: 2^-53.
pub fn default_eps() -> Rational {
    pow2(-53)
}

/// Working state of the forward pass: value N/D and, per error variable,
/// the numerator P of the derivative P/D².
struct Fwd {
    num: Polynomial<Rational>,
    den: Polynomial<Rational>,
    der: BTreeMap<usize, Polynomial<Rational>>,
}

impl Fwd {
    fn leaf(p: Polynomial<Rational>) -> Self {
        let n = p.nvars();
        Fwd { num: p, den: Polynomial::one(n), der: BTreeMap::new() }
    }

    /// Fold a constant denominator c into N (and c² into every P).
    fn normalize(mut self) -> Self {
        if let Some(c) = self.den.as_constant() {
            if !c.is_one() {
                let inv = Rational::one() / c;
                let inv2 = &inv * &inv;
                self.num = self.num.scale(&inv);
                for p in self.der.values_mut() {
                    *p = p.scale(&inv2);
                }
                self.den = Polynomial::one(self.den.nvars());
            }
        }
        self
    }

    fn combine(
        a: &Fwd,
        b: &Fwd,
        num: Polynomial<Rational>,
        den: Polynomial<Rational>,
        wa: &Polynomial<Rational>,
        wb: &Polynomial<Rational>,
    ) -> Fwd {
        let mut der: BTreeMap<usize, Polynomial<Rational>> = BTreeMap::new();
        for (j, p) in &a.der {
            der.insert(*j, p * wa);
        }
        for (j, p) in &b.der {
            let t = p * wb;
            match der.get_mut(j) {
                Some(e) => *e = &*e + &t,
                None => {
                    der.insert(*j, t);
                }
            }
        }
        der.retain(|_, p| !p.is_zero());
        Fwd { num, den, der }.normalize()
    }

    fn add(a: &Fwd, b: &Fwd, sign: i64) -> Fwd {
        let nb = if sign < 0 { -&b.num } else { b.num.clone() };
        let n = a.num.nvars();
        let sgn = Polynomial::constant(n, Rational::from_integer(sign.into()));
        if a.den == b.den {
            return Fwd::combine(a, b, &a.num + &nb, a.den.clone(), &Polynomial::one(n), &sgn);
        }
        let num = &(&a.num * &b.den) + &(&nb * &a.den);
        let den = &a.den * &b.den;
        let wa = &b.den * &b.den;
        let wb = &(&a.den * &a.den) * &sgn;
        Fwd::combine(a, b, num, den, &wa, &wb)
    }

    fn mul(a: &Fwd, b: &Fwd) -> Fwd {
        let wa = &b.num * &b.den;
        let wb = &a.num * &a.den;
        Fwd::combine(a, b, &a.num * &b.num, &a.den * &b.den, &wa, &wb)
    }

    fn div(a: &Fwd, b: &Fwd) -> Result<Fwd> {
        if b.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let wa = &b.den * &b.num;
        let wb = -&(&a.num * &a.den);
        Ok(Fwd::combine(a, b, &a.num * &b.den, &a.den * &b.num, &wa, &wb))
    }

    fn neg(a: &Fwd) -> Fwd {
        Fwd { num: -&a.num, den: a.den.clone(), der: a.der.iter().map(|(j, p)| (*j, -p)).collect() }
    }

    /// Multiply by (1 + e_j): d/de_j at e = 0 picks up the value N/D = N·D/D².
    fn round(mut self, j: usize) -> Fwd {
        let v = &self.num * &self.den;
        match self.der.get_mut(&j) {
            Some(p) => *p = &*p + &v,
            None => {
                self.der.insert(j, v);
            }
        }
        self.der.retain(|_, p| !p.is_zero());
        self
    }
}

/// Compute s_j = ∂r/∂e_j (x, 0) symbolically by forward differentiation
/// of the program graph.
pub fn taylor_split(prog: &Program, rounded: RoundedProgram, eps: Rational) -> Result<ErrorForm> {
    let n = prog.nvars();
    let src = &prog.dag;
    let mut vals: HashMap<NodeId, Fwd> = HashMap::new();
    for id in src.reachable(prog.body) {
        let errs = rounded.errors_at(id);
        let v = match src.node(id) {
            Node::Var(i) => Fwd::leaf(Polynomial::var(n, *i)),
            Node::Const(c) => Fwd::leaf(Polynomial::constant(n, c.clone())),
            Node::Add(a, b) => Fwd::add(&vals[a], &vals[b], 1),
            Node::Sub(a, b) => Fwd::add(&vals[a], &vals[b], -1),
            Node::Mul(a, b) => Fwd::mul(&vals[a], &vals[b]),
            Node::Div(a, b) => Fwd::div(&vals[a], &vals[b])?,
            Node::Neg(a) => Fwd::neg(&vals[a]),
            Node::Pow(a, k) => {
                let base = &vals[a];
                let mut acc = Fwd { num: base.num.clone(), den: base.den.clone(), der: base.der.clone() };
                for step in 1..*k as usize {
                    acc = Fwd::mul(&acc, base).round(errs[step - 1]);
                }
                vals.insert(id, acc);
                continue;
            }
        };
        let v = errs.iter().fold(v, |acc, &j| acc.round(j));
        vals.insert(id, v);
    }
    let root = vals.remove(&prog.body).unwrap();
    if root.den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let m = rounded.m;
    let p: Vec<Polynomial<Rational>> =
        (0..m).map(|j| root.der.get(&j).cloned().unwrap_or_else(|| Polynomial::zero(n))).collect();
    let f = RationalFunction::new(root.num, root.den.clone())?;
    Ok(ErrorForm { n, m, f, q: root.den, p, eps, sources: rounded.sources.clone(), rounded })
}

impl ErrorForm {
    /// Parse-to-decomposition convenience: rounding model plus Taylor split.
    pub fn from_program(prog: &Program, policy: ConstantPolicy, eps: Rational) -> Result<Self> {
        let rounded = apply_rounding_model(prog, policy)?;
        taylor_split(prog, rounded, eps)
    }

    pub fn is_polynomial(&self) -> bool {
        self.q.as_constant().is_some_and(|c| c.is_one())
    }

    /// q² (the common denominator of every s_j).
    pub fn q_squared(&self) -> Polynomial<Rational> {
        &self.q * &self.q
    }

    pub fn s(&self) -> Vec<RationalFunction<Rational>> {
        let q2 = self.q_squared();
        self.p.iter().map(|p| RationalFunction::new(p.clone(), q2.clone()).unwrap()).collect()
    }

    /// The s_j as polynomials (polynomial programs only).
    pub fn s_poly(&self) -> Option<&[Polynomial<Rational>]> {
        self.is_polynomial().then_some(self.p.as_slice())
    }

    /// deg(l') = deg(f) + 1, using max(deg num, deg den) for quotients.
    pub fn degree(&self) -> u32 {
        self.f.num().total_degree().max(self.f.den().total_degree()) + 1
    }

    /// l'(x, e) = Σ s_j(x) e_j as a polynomial over the n + m variables
    /// (polynomial programs only).
    pub fn lprime(&self) -> Option<Polynomial<Rational>> {
        let s = self.s_poly()?;
        let total = self.n + self.m;
        let targets: Vec<usize> = (0..self.n).collect();
        let mut out = Polynomial::zero(total);
        for (j, sj) in s.iter().enumerate() {
            let lifted = sj.embed(total, &targets);
            out = &out + &(&lifted * &Polynomial::var(total, self.n + j));
        }
        Some(out)
    }

    /// r(x, e) = f̂(x, e) − f(x), exactly.
    pub fn eval_r(&self, x: &[Rational], e: &[Rational]) -> Result<Rational> {
        let mut pt = x.to_vec();
        pt.extend_from_slice(e);
        let fhat = self.rounded.dag.eval(self.rounded.root, &pt)?;
        Ok(fhat - self.f.eval(x)?)
    }

    /// l(x, e) = Σ s_j(x) e_j, exactly.
    pub fn eval_l(&self, x: &[Rational], e: &[Rational]) -> Result<Rational> {
        let q = self.q.eval(x)?;
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let q2 = &q * &q;
        let mut acc = Rational::zero();
        for (p, ej) in self.p.iter().zip(e) {
            if !ej.is_zero() {
                acc += p.eval(x)? * ej;
            }
        }
        Ok(acc / q2)
    }

    /// h(x, e) = r − l, exactly.
    pub fn eval_h(&self, x: &[Rational], e: &[Rational]) -> Result<Rational> {
        Ok(self.eval_r(x, e)? - self.eval_l(x, e)?)
    }
}
