//! Enclosure of the higher-order remainder h = r − l.
//!
//! Plain interval evaluation of f̂ − f − l loses everything to cancellation:
//! the O(1) parts of f̂ and f do not cancel in interval arithmetic. Instead
//! the rounded graph is evaluated in first-order Taylor-model arithmetic
//! with respect to the error variables. Each node carries
//!
//! * `val` — an enclosure of its exact (error-free) value over the box,
//! * `lin[j]` — an enclosure of the coefficient of e_j,
//! * `rem` — an enclosure of every term of order ≥ 2 in e,
//!
//! so that node(x, e) ∈ val + Σ lin_j e_j + rem pointwise. At the root the
//! value part is f and the linear part is l, hence `rem ⊇ range(h)`.

use std::collections::HashMap;

use super::rounding::ErrorForm;
use crate::algebra::{Interval, Node, Scalar};
use crate::error::Result;

#[derive(Clone)]
struct Tm<S: Scalar> {
    val: Interval<S>,
    lin: Vec<Interval<S>>,
    rem: Interval<S>,
}

struct Ctx<S: Scalar> {
    m: usize,
    /// [-ε, ε]
    e: Interval<S>,
}

impl<S: Scalar> Ctx<S> {
    fn constant(&self, v: Interval<S>) -> Tm<S> {
        Tm { val: v, lin: vec![Interval::zero(); self.m], rem: Interval::zero() }
    }

    /// Enclosure of Σ lin_j e_j.
    fn linear_range(&self, t: &Tm<S>) -> Interval<S> {
        let mut acc = S::zero();
        for c in &t.lin {
            if !c.is_zero() {
                acc = acc.add_up(&c.mag());
            }
        }
        Interval::symmetric(acc.mul_up(self.e.hi()))
    }

    fn add(&self, a: &Tm<S>, b: &Tm<S>) -> Tm<S> {
        Tm {
            val: a.val.add(&b.val),
            lin: a.lin.iter().zip(&b.lin).map(|(x, y)| x.add(y)).collect(),
            rem: a.rem.add(&b.rem),
        }
    }

    fn neg(&self, a: &Tm<S>) -> Tm<S> {
        Tm { val: a.val.neg(), lin: a.lin.iter().map(Interval::neg).collect(), rem: a.rem.neg() }
    }

    fn mul(&self, a: &Tm<S>, b: &Tm<S>) -> Tm<S> {
        let la = self.linear_range(a);
        let lb = self.linear_range(b);
        let lin = a
            .lin
            .iter()
            .zip(&b.lin)
            .map(|(ca, cb)| {
                let mut out = Interval::zero();
                if !cb.is_zero() {
                    out = out.add(&a.val.mul(cb));
                }
                if !ca.is_zero() {
                    out = out.add(&b.val.mul(ca));
                }
                out
            })
            .collect();
        // (va + La + Ra)(vb + Lb + Rb) − va vb − (va Lb + vb La)
        //   = La Lb + Ra (vb + Lb + Rb) + Rb (va + La)
        let mut rem = la.mul(&lb);
        if !a.rem.is_zero() {
            rem = rem.add(&a.rem.mul(&b.val.add(&lb).add(&b.rem)));
        }
        if !b.rem.is_zero() {
            rem = rem.add(&b.rem.mul(&a.val.add(&la)));
        }
        Tm { val: a.val.mul(&b.val), lin, rem }
    }

    /// a·a: the same terms as `mul`, but the even parts are enclosed as
    /// squares so the value of x·x never dips below zero.
    fn sqr(&self, a: &Tm<S>) -> Tm<S> {
        let la = self.linear_range(a);
        let two = Interval::point(S::from_i64(2));
        let lin = a.lin.iter().map(|c| if c.is_zero() { Interval::zero() } else { a.val.mul(c).mul(&two) }).collect();
        // (v + L + R)² − v² − 2vL = L² + R(2v + 2L + R)
        let mut rem = la.sqr();
        if !a.rem.is_zero() {
            rem = rem.add(&a.rem.mul(&a.val.add(&la).mul(&two).add(&a.rem)));
        }
        Tm { val: a.val.sqr(), lin, rem }
    }

    /// 1/(v + δ) = 1/v − δ/v² + δ²/(v²(v + δ)) with δ = L + R.
    fn recip(&self, b: &Tm<S>) -> Result<Tm<S>> {
        let inv = b.val.recip()?;
        let inv2 = inv.sqr();
        let lb = self.linear_range(b);
        let delta = lb.add(&b.rem);
        let whole = b.val.add(&delta).recip()?;
        let lin = b.lin.iter().map(|c| if c.is_zero() { Interval::zero() } else { c.mul(&inv2).neg() }).collect();
        let rem = b.rem.mul(&inv2).neg().add(&delta.sqr().mul(&inv2).mul(&whole));
        Ok(Tm { val: inv, lin, rem })
    }
}

/// Enclose h = r − l over `boxes × [−ε, ε]^m`.
pub fn bound_remainder<S: Scalar>(ef: &ErrorForm, boxes: &[Interval<S>]) -> Result<Interval<S>> {
    let rp = &ef.rounded;
    let (n, m) = (rp.n, rp.m);
    assert_eq!(boxes.len(), n, "box dimension mismatch");
    let eps = S::from_rational_up(&ef.eps);
    let ctx = Ctx { m, e: Interval::symmetric(eps) };
    let mut vals: HashMap<usize, Tm<S>> = HashMap::new();
    for id in rp.dag.reachable(rp.root) {
        let t = match rp.dag.node(id) {
            Node::Var(i) if *i < n => ctx.constant(boxes[*i].clone()),
            Node::Var(i) => {
                let mut t = ctx.constant(Interval::zero());
                t.lin[*i - n] = Interval::point(S::one());
                t
            }
            Node::Const(c) => ctx.constant(Interval::from_rational(c, c)),
            Node::Add(a, b) => ctx.add(&vals[a], &vals[b]),
            Node::Sub(a, b) => ctx.add(&vals[a], &ctx.neg(&vals[b])),
            Node::Mul(a, b) if a == b => ctx.sqr(&vals[a]),
            Node::Mul(a, b) => ctx.mul(&vals[a], &vals[b]),
            Node::Div(a, b) => {
                let r = ctx.recip(&vals[b])?;
                ctx.mul(&vals[a], &r)
            }
            Node::Neg(a) => ctx.neg(&vals[a]),
            Node::Pow(a, k) => {
                let base = vals[a].clone();
                let mut acc = base.clone();
                for i in 1..*k {
                    acc = if i == 1 { ctx.sqr(&base) } else { ctx.mul(&acc, &base) };
                }
                acc
            }
        };
        vals.insert(id, t);
    }
    let root = vals.remove(&rp.root).unwrap();
    debug_assert!(root.lin.len() == m);
    if root.rem.lo().is_zero() && root.rem.hi().is_zero() {
        return Ok(Interval::zero());
    }
    Ok(root.rem)
}
