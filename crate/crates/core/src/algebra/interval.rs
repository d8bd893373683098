use std::fmt;


use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]`. Float endpoints are always rounded outward,
/// so every operation returns a superset of the exact image.
#[derive(Clone, PartialEq)]
pub struct Interval<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn new(lo: S, hi: S) -> Self {
        assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: S) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn zero() -> Self {
        Self::point(S::zero())
    }

    /// `[-r, r]` for `r >= 0`.
    pub fn symmetric(r: S) -> Self {
        Interval::new(-r.clone(), r)
    }

    /// Outward enclosure of an exact rational interval.
    pub fn from_rational(lo: &Rational, hi: &Rational) -> Self {
        Interval::new(S::from_rational_down(lo), S::from_rational_up(hi))
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn contains(&self, v: &S) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= S::zero() && S::zero() <= self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// max(|lo|, |hi|)
    pub fn mag(&self) -> S {
        S::max_of(self.lo.abs(), self.hi.abs())
    }

    pub fn width(&self) -> S {
        self.hi.sub_up(&self.lo)
    }

    pub fn hull(&self, other: &Self) -> Self {
        Interval { lo: S::min_of(self.lo.clone(), other.lo.clone()), hi: S::max_of(self.hi.clone(), other.hi.clone()) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval { lo: self.lo.add_down(&o.lo), hi: self.hi.add_up(&o.hi) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval { lo: self.lo.sub_down(&o.hi), hi: self.hi.sub_up(&o.lo) }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        let los = [a.mul_down(c), a.mul_down(d), b.mul_down(c), b.mul_down(d)];
        let his = [a.mul_up(c), a.mul_up(d), b.mul_up(c), b.mul_up(d)];
        Interval {
            lo: los.into_iter().reduce(S::min_of).unwrap(),
            hi: his.into_iter().reduce(S::max_of).unwrap(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.mul(&Interval::point(c.clone()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::DivisionByZeroInterval);
        }
        let one = S::one();
        Ok(Interval { lo: one.div_down(&self.hi), hi: one.div_up(&self.lo) })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.contains_zero() {
            return Err(Error::DivisionByZeroInterval);
        }
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        let los = [a.div_down(c), a.div_down(d), b.div_down(c), b.div_down(d)];
        let his = [a.div_up(c), a.div_up(d), b.div_up(c), b.div_up(d)];
        Ok(Interval {
            lo: los.into_iter().reduce(S::min_of).unwrap(),
            hi: his.into_iter().reduce(S::max_of).unwrap(),
        })
    }

    pub fn sqr(&self) -> Self {
        self.powi(2)
    }

    /// Integer power with the tight even-power rule.
    pub fn powi(&self, k: u32) -> Self {
        if k == 0 {
            return Interval::point(S::one());
        }
        let pow_down = |x: &S| (1..k).fold(x.clone(), |acc, _| acc.mul_down(x));
        let pow_up = |x: &S| (1..k).fold(x.clone(), |acc, _| acc.mul_up(x));
        if k % 2 == 1 {
            // x^k is monotone; directed products of a negative base need
            // care, so fall back to repeated interval multiplication.
            if self.lo >= S::zero() {
                return Interval { lo: pow_down(&self.lo), hi: pow_up(&self.hi) };
            }
            let mut acc = self.clone();
            for _ in 1..k {
                acc = acc.mul(self);
            }
            return acc;
        }
        let m = self.mag();
        let mn = if self.contains_zero() { S::zero() } else { S::min_of(self.lo.abs(), self.hi.abs()) };
        Interval { lo: pow_down(&mn), hi: pow_up(&m) }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.to_f64().is_finite() && self.hi.to_f64().is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

impl<S: Scalar> fmt::Debug for Interval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, rat_int};

    #[test]
    fn even_power_is_tight() {
        let i = Interval::new(rat_int(-1), rat(1, 2));
        assert_eq!(i.powi(2), Interval::new(rat_int(0), rat_int(1)));
        assert_eq!(i.mul(&i), Interval::new(rat(-1, 2), rat_int(1)));
        let j = Interval::new(rat_int(-3), rat_int(-2));
        assert_eq!(j.powi(3), Interval::new(rat_int(-27), rat_int(-8)));
    }

    #[test]
    fn division_rejects_zero() {
        let a = Interval::new(1.0, 2.0);
        assert!(a.div(&Interval::new(-1.0, 1.0)).is_err());
        let r = Interval::point(1.0).div(&a).unwrap();
        assert!(r.contains(&0.5) && r.contains(&1.0));
    }

    #[test]
    fn float_rounds_outward() {
        let a = Interval::point(0.1f64);
        let s = a.add(&Interval::point(0.2));
        let exact = crate::algebra::scalar::from_f64_exact(0.1).unwrap() + crate::algebra::scalar::from_f64_exact(0.2).unwrap();
        assert!(crate::algebra::scalar::from_f64_exact(*s.lo()).unwrap() <= exact);
        assert!(crate::algebra::scalar::from_f64_exact(*s.hi()).unwrap() >= exact);
        assert!(s.lo() < s.hi());
    }
}
