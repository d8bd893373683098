use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use super::multi_index::MultiIndex;
use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with coefficients in `S`.
///
/// Only nonzero coefficients are stored; the zero polynomial has an empty
/// term map. Terms iterate in graded-lex order.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: S) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, S::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range");
        let mut p = Self::zero(nvars);
        p.terms.insert(MultiIndex::unit(nvars, i), S::one());
        p
    }

    /// Build from (exponent, coefficient) pairs, summing repeated exponents.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Self {
        let mut p = Self::zero(nvars);
        for (a, c) in terms {
            assert_eq!(a.len(), nvars, "exponent length mismatch");
            p.add_term(a, c);
        }
        p
    }

    fn add_term(&mut self, a: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(a) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &S)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, a: &MultiIndex) -> S {
        self.terms.get(a).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term when the polynomial has no other terms.
    pub fn as_constant(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => {
                let (a, c) = self.terms.iter().next().unwrap();
                a.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Componentwise maximum of the stored exponents (all zeros for the zero
    /// polynomial).
    pub fn multi_degree(&self) -> MultiIndex {
        self.terms.keys().fold(MultiIndex::zero(self.nvars), |acc, a| acc.join(a))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::total).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v.clone() * c)).filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_nvars(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_nvars(other)?;
        Ok(self * other)
    }

    fn check_nvars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarCountMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            let e = a.get(var);
            if e > 0 {
                out.add_term(a.with(var, e - 1), c.clone() * S::from_i64(e as i64));
            }
        }
        Ok(out)
    }

    /// Substitute `x_var := a + (b - a) * y_var`.
    pub fn affine_substitute(&self, var: usize, a: &S, b: &S) -> Result<Self> {
        if var >= self.nvars {
            return Err(Error::IndexOutOfRange { index: var, nvars: self.nvars });
        }
        let w = b.clone() - a;
        let max_e = self.terms.keys().map(|k| k.get(var)).max().unwrap_or(0) as usize;
        // (a + w y)^e expanded once per exponent.
        let mut expansions: Vec<Vec<S>> = vec![vec![S::one()]];
        for e in 1..=max_e {
            let prev = &expansions[e - 1];
            let mut next = vec![S::zero(); e + 1];
            for (i, c) in prev.iter().enumerate() {
                next[i] += c.clone() * a;
                next[i + 1] += c.clone() * &w;
            }
            expansions.push(next);
        }
        let mut out = Self::zero(self.nvars);
        for (alpha, c) in &self.terms {
            let e = alpha.get(var) as usize;
            for (i, bc) in expansions[e].iter().enumerate() {
                out.add_term(alpha.with(var, i as u32), c.clone() * bc);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[S]) -> Result<S> {
        if point.len() != self.nvars {
            return Err(Error::PointLength { got: point.len(), expected: self.nvars });
        }
        let mut acc = S::zero();
        for (a, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in a.as_slice().iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(a, c)| (a.clone(), f(c))))
    }

    /// Re-express over `nvars` variables, sending local variable `i` to
    /// `targets[i]`.
    pub fn embed(&self, nvars: usize, targets: &[usize]) -> Self {
        assert_eq!(targets.len(), self.nvars);
        Polynomial::from_terms(
            nvars,
            self.terms.iter().map(|(a, c)| {
                let mut v = vec![0u32; nvars];
                for (i, &e) in a.as_slice().iter().enumerate() {
                    v[targets[i]] += e;
                }
                (MultiIndex::from_vec(v), c.clone())
            }),
        )
    }

    /// Sum of absolute values of the coefficients.
    pub fn coeff_abs_sum(&self) -> S {
        self.terms.values().fold(S::zero(), |acc, c| acc + c.abs())
    }
}

impl Polynomial<Rational> {
    /// Explicit widening of an exact polynomial into another backend.
    pub fn to_backend<T: Scalar>(&self) -> Polynomial<T> {
        self.map_coeffs(T::from_rational)
    }
}

impl<'a, S: Scalar> Add<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn add(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Sub<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn sub(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Mul<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;

    fn mul(self, rhs: &Polynomial<S>) -> Polynomial<S> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = Polynomial::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                out.add_term(a.add(b), c.clone() * d);
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;

    fn neg(self) -> Polynomial<S> {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(a, c)| (a.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Polynomial<S>> for Polynomial<S> {
            type Output = Polynomial<S>;
            fn $m(self, rhs: Polynomial<S>) -> Polynomial<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        -&self
    }
}

impl<S: Scalar> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Display for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (a, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            for (i, &e) in a.as_slice().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

/// `a + b`, failing on a variable-count mismatch.
pub fn poly_add<S: Scalar>(a: &Polynomial<S>, b: &Polynomial<S>) -> Result<Polynomial<S>> {
    a.checked_add(b)
}

/// `a * b`, failing on a variable-count mismatch.
pub fn poly_mul<S: Scalar>(a: &Polynomial<S>, b: &Polynomial<S>) -> Result<Polynomial<S>> {
    a.checked_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, rat_int};

    type P = Polynomial<Rational>;

    fn x(n: usize, i: usize) -> P {
        P::var(n, i)
    }
    fn c(n: usize, v: i64) -> P {
        P::constant(n, rat_int(v))
    }

    #[test]
    fn add_examples() {
        let xx = &x(1, 0) * &x(1, 0);
        assert_eq!(poly_add(&(&xx - &x(1, 0)), &x(1, 0)).unwrap(), xx);
        assert_eq!(poly_add(&xx, &P::zero(1)).unwrap(), xx);
        let x1x2 = &x(2, 0) * &x(2, 1);
        assert_eq!(&x1x2 + &x1x2.scale(&rat_int(2)), x1x2.scale(&rat_int(3)));
        assert!(poly_add(&x(1, 0), &x(2, 0)).is_err());
    }

    #[test]
    fn mul_examples() {
        let xm1 = &x(1, 0) - &c(1, 1);
        assert_eq!(&x(1, 0) * &xm1, &(&x(1, 0) * &x(1, 0)) - &x(1, 0));
        assert_eq!(&xm1 * &P::one(1), xm1);
        let s = &x(2, 0) + &x(2, 1);
        let expect = &(&(&x(2, 0) * &x(2, 0)) + &(&x(2, 0) * &x(2, 1)).scale(&rat_int(2))) + &(&x(2, 1) * &x(2, 1));
        assert_eq!(s.pow(2), expect);
        assert!(poly_mul(&x(1, 0), &x(3, 0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let p = &(&x(1, 0) * &x(1, 0)) - &x(1, 0);
        assert_eq!(p.partial_derivative(0).unwrap(), &x(1, 0).scale(&rat_int(2)) - &c(1, 1));
        assert!(c(2, 5).partial_derivative(1).unwrap().is_zero());
        let q = &x(2, 0).pow(2) * &x(2, 1).pow(3);
        assert_eq!(q.partial_derivative(1).unwrap(), (&x(2, 0).pow(2) * &x(2, 1).pow(2)).scale(&rat_int(3)));
        assert!(q.partial_derivative(2).is_err());
    }

    #[test]
    fn affine_examples() {
        let p = x(1, 0);
        assert_eq!(p.affine_substitute(0, &rat_int(-1), &rat_int(1)).unwrap(), &x(1, 0).scale(&rat_int(2)) - &c(1, 1));
        let sq = x(1, 0).pow(2);
        assert_eq!(sq.affine_substitute(0, &rat_int(0), &rat_int(1)).unwrap(), sq);
        let t = p.affine_substitute(0, &rat_int(4), &rat(636, 100)).unwrap();
        assert_eq!(t.coeff(&MultiIndex::zero(1)), rat_int(4));
        assert_eq!(t.coeff(&MultiIndex::unit(1, 0)), rat(59, 25));
        for i in 0..10 {
            let y = rat(i, 9);
            let xv = rat_int(4) + rat(59, 25) * &y;
            assert_eq!(t.eval(&[y]).unwrap(), p.eval(&[xv]).unwrap());
        }
    }

    #[test]
    fn eval_examples() {
        let p = &x(1, 0).pow(2) - &x(1, 0);
        assert_eq!(p.eval(&[rat(1, 2)]).unwrap(), rat(-1, 4));
        let q = &p + &c(1, 7);
        assert_eq!(q.eval(&[rat_int(0)]).unwrap(), rat_int(7));
        assert!(q.eval(&[]).is_err());
    }

    #[test]
    fn zero_polynomial_degree() {
        assert_eq!(P::zero(3).multi_degree(), MultiIndex::zero(3));
        assert_eq!(P::zero(3).total_degree(), 0);
    }

    #[test]
    fn embed_moves_variables() {
        let p = &x(2, 0) * &x(2, 1).pow(2);
        let q = p.embed(4, &[3, 1]);
        assert_eq!(q, &x(4, 3) * &x(4, 1).pow(2));
    }
}
