use std::collections::HashMap;

use num_traits::One;

use super::interval::Interval;
use super::polynomial::Polynomial;
use super::rational_fn::RationalFunction;
use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Var(usize),
    Const(Rational),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Div(NodeId, NodeId),
    Neg(NodeId),
    Pow(NodeId, u32),
}

impl Node {
    pub fn children(&self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match *self {
            Node::Var(_) | Node::Const(_) => (None, None),
            Node::Neg(a) | Node::Pow(a, _) => (Some(a), None),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }
}

/// Hash-consed expression graph: structurally equal subexpressions are
/// stored once, and children always precede their parents.
#[derive(Clone, Debug, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Dag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        debug_assert!(node.children().all(|c| c < self.nodes.len()));
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn var(&mut self, i: usize) -> NodeId {
        self.intern(Node::Var(i))
    }
    pub fn constant(&mut self, c: Rational) -> NodeId {
        self.intern(Node::Const(c))
    }
    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(Node::Add(a, b))
    }
    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(Node::Sub(a, b))
    }
    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(Node::Mul(a, b))
    }
    pub fn div(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.intern(Node::Div(a, b))
    }
    pub fn neg(&mut self, a: NodeId) -> NodeId {
        self.intern(Node::Neg(a))
    }
    pub fn pow(&mut self, a: NodeId, k: u32) -> NodeId {
        self.intern(Node::Pow(a, k))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes reachable from `root`, in topological (children-first) order.
    pub fn reachable(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; root + 1];
        seen[root] = true;
        for id in (0..=root).rev() {
            if seen[id] {
                for c in self.nodes[id].children() {
                    seen[c] = true;
                }
            }
        }
        (0..=root).filter(|&i| seen[i]).collect()
    }

    /// Largest variable index used below `root`, plus one.
    pub fn var_count(&self, root: NodeId) -> usize {
        self.reachable(root)
            .into_iter()
            .filter_map(|id| match self.nodes[id] {
                Node::Var(i) => Some(i + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn has_division(&self, root: NodeId) -> bool {
        self.reachable(root).into_iter().any(|id| matches!(self.nodes[id], Node::Div(..)))
    }

    /// Point evaluation; constants are widened with nearest rounding.
    pub fn eval<S: Scalar>(&self, root: NodeId, point: &[S]) -> Result<S> {
        let mut vals: HashMap<NodeId, S> = HashMap::new();
        for id in self.reachable(root) {
            let v = match &self.nodes[id] {
                Node::Var(i) => point.get(*i).cloned().ok_or(Error::PointLength { got: point.len(), expected: i + 1 })?,
                Node::Const(c) => S::from_rational(c),
                Node::Add(a, b) => vals[a].clone() + &vals[b],
                Node::Sub(a, b) => vals[a].clone() - &vals[b],
                Node::Mul(a, b) => vals[a].clone() * &vals[b],
                Node::Div(a, b) => {
                    if vals[b].is_zero() {
                        return Err(Error::ZeroDenominator);
                    }
                    vals[a].clone() / &vals[b]
                }
                Node::Neg(a) => -vals[a].clone(),
                Node::Pow(a, k) => (0..*k).fold(S::one(), |acc, _| acc * &vals[a]),
            };
            vals.insert(id, v);
        }
        Ok(vals.remove(&root).unwrap())
    }

    /// Naive interval evaluation over a box.
    pub fn interval_eval<S: Scalar>(&self, root: NodeId, boxes: &[Interval<S>]) -> Result<Interval<S>> {
        let mut vals: HashMap<NodeId, Interval<S>> = HashMap::new();
        for id in self.reachable(root) {
            let v = match &self.nodes[id] {
                Node::Var(i) => boxes.get(*i).cloned().ok_or(Error::PointLength { got: boxes.len(), expected: i + 1 })?,
                Node::Const(c) => Interval::from_rational(c, c),
                Node::Add(a, b) => vals[a].add(&vals[b]),
                Node::Mul(a, b) if a == b => vals[a].sqr(),
                Node::Mul(a, b) => vals[a].mul(&vals[b]),
                Node::Sub(a, b) => vals[a].sub(&vals[b]),
                Node::Div(a, b) => vals[a].div(&vals[b])?,
                Node::Neg(a) => vals[a].neg(),
                Node::Pow(a, k) => vals[a].powi(*k),
            };
            vals.insert(id, v);
        }
        Ok(vals.remove(&root).unwrap())
    }

    /// Expand the expression below `root` into a single quotient of
    /// polynomials over `nvars` variables.
    pub fn to_rational_function(&self, root: NodeId, nvars: usize) -> Result<RationalFunction<Rational>> {
        let mut vals: HashMap<NodeId, Frac> = HashMap::new();
        for id in self.reachable(root) {
            let v = match &self.nodes[id] {
                Node::Var(i) => {
                    if *i >= nvars {
                        return Err(Error::IndexOutOfRange { index: *i, nvars });
                    }
                    Frac::poly(Polynomial::var(nvars, *i))
                }
                Node::Const(c) => Frac::poly(Polynomial::constant(nvars, c.clone())),
                Node::Add(a, b) => vals[a].add(&vals[b]),
                Node::Sub(a, b) => vals[a].add(&vals[b].neg()),
                Node::Mul(a, b) => vals[a].mul(&vals[b]),
                Node::Div(a, b) => vals[a].div(&vals[b])?,
                Node::Neg(a) => vals[a].neg(),
                Node::Pow(a, k) => (0..*k).fold(Frac::poly(Polynomial::one(nvars)), |acc, _| acc.mul(&vals[a])),
            };
            vals.insert(id, v);
        }
        let f = vals.remove(&root).unwrap();
        RationalFunction::new(f.num, f.den)
    }
}

/// Working quotient with light normalisation: constant denominators are
/// folded into the numerator and equal denominators are not multiplied.
#[derive(Clone)]
struct Frac {
    num: Polynomial<Rational>,
    den: Polynomial<Rational>,
}

impl Frac {
    fn poly(p: Polynomial<Rational>) -> Self {
        let n = p.nvars();
        Frac { num: p, den: Polynomial::one(n) }
    }

    fn normalized(num: Polynomial<Rational>, den: Polynomial<Rational>) -> Self {
        if let Some(c) = den.as_constant() {
            if !c.is_one() {
                let n = den.nvars();
                return Frac { num: num.scale(&(Rational::one() / c)), den: Polynomial::one(n) };
            }
        }
        Frac { num, den }
    }

    fn add(&self, o: &Frac) -> Frac {
        if self.den == o.den {
            return Frac::normalized(&self.num + &o.num, self.den.clone());
        }
        Frac::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    fn neg(&self) -> Frac {
        Frac { num: -&self.num, den: self.den.clone() }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac::normalized(&self.num * &o.num, &self.den * &o.den)
    }

    fn div(&self, o: &Frac) -> Result<Frac> {
        if o.num.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if self.den == o.den {
            return Ok(Frac::normalized(self.num.clone(), o.num.clone()));
        }
        Ok(Frac::normalized(&self.num * &o.den, &self.den * &o.num))
    }
}

/// Free-function form of [`Dag::interval_eval`].
pub fn interval_eval<S: Scalar>(dag: &Dag, root: NodeId, boxes: &[Interval<S>]) -> Result<Interval<S>> {
    dag.interval_eval(root, boxes)
}
