use std::fmt;

use super::polynomial::Polynomial;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Quotient of two polynomials over the same variables; the denominator is
/// never the zero polynomial.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<S> {
    num: Polynomial<S>,
    den: Polynomial<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn new(num: Polynomial<S>, den: Polynomial<S>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.nvars() != den.nvars() {
            return Err(Error::VarCountMismatch(num.nvars(), den.nvars()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial<S>) -> Self {
        let n = p.nvars();
        RationalFunction { num: p, den: Polynomial::one(n) }
    }

    pub fn num(&self) -> &Polynomial<S> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<S> {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    /// True when the denominator is a constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// The polynomial this function equals, when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<Polynomial<S>> {
        let c = self.den.as_constant()?;
        Some(self.num.scale(&(S::one() / c)))
    }

    pub fn eval(&self, point: &[S]) -> Result<S> {
        let d = self.den.eval(point)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.num.eval(point)? / d)
    }

    pub fn affine_substitute(&self, var: usize, a: &S, b: &S) -> Result<Self> {
        Ok(RationalFunction { num: self.num.affine_substitute(var, a, b)?, den: self.den.affine_substitute(var, a, b)? })
    }
}

impl<S: Scalar> fmt::Debug for RationalFunction<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}
