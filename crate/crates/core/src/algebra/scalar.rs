use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Which arithmetic a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        })
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "rational" => Ok(Backend::Exact),
            "float" | "double" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// Field element used by every numeric routine.
///
/// Conversions go one way only: exact rationals can be widened to a scalar
/// (`from_rational*`), but there is deliberately no route from a float back
/// into the exact world except [`from_f64_exact`], which certificate checking
/// uses explicitly.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    const BACKEND: Backend;

    /// Nearest representable value.
    fn from_rational(r: &Rational) -> Self;
    /// Largest representable value `<= r`.
    fn from_rational_down(r: &Rational) -> Self;
    /// Smallest representable value `>= r`.
    fn from_rational_up(r: &Rational) -> Self;

    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Smallest double `>= self`.
    fn to_f64_up(&self) -> f64;
    /// Largest double `<= self`.
    fn to_f64_down(&self) -> f64;
    /// Exact textual form (`p/q`), for backends that have one.
    fn exact_string(&self) -> Option<String> {
        None
    }
    fn abs(&self) -> Self;

    fn add_down(&self, rhs: &Self) -> Self;
    fn add_up(&self, rhs: &Self) -> Self;
    fn mul_down(&self, rhs: &Self) -> Self;
    fn mul_up(&self, rhs: &Self) -> Self;
    fn div_down(&self, rhs: &Self) -> Self;
    fn div_up(&self, rhs: &Self) -> Self;

    fn sub_down(&self, rhs: &Self) -> Self {
        self.add_down(&-rhs.clone())
    }
    fn sub_up(&self, rhs: &Self) -> Self {
        self.add_up(&-rhs.clone())
    }

    fn is_exact() -> bool {
        Self::BACKEND == Backend::Exact
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_rational_down(r: &Rational) -> Self {
        r.clone()
    }
    fn from_rational_up(r: &Rational) -> Self {
        r.clone()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_f64_up(&self) -> f64 {
        let f = <f64 as Scalar>::from_rational_up(self);
        if f == f64::MAX && from_f64_exact(f).is_some_and(|q| &q < self) {
            f64::INFINITY
        } else {
            f
        }
    }
    fn to_f64_down(&self) -> f64 {
        let f = <f64 as Scalar>::from_rational_down(self);
        if f == f64::MIN && from_f64_exact(f).is_some_and(|q| &q > self) {
            f64::NEG_INFINITY
        } else {
            f
        }
    }
    fn exact_string(&self) -> Option<String> {
        Some(self.to_string())
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn add_down(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn add_up(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul_down(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn mul_up(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div_down(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn div_up(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

// Directed rounding for binary64 without touching the FPU rounding mode:
// compute the nearest result, recover the exact rounding error with an
// error-free transformation, and step one ulp only when the error points
// the wrong way.

fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

fn adjust_down(r: f64, err_sign: f64) -> f64 {
    if !r.is_finite() {
        return if r == f64::INFINITY { f64::MAX } else { r };
    }
    if err_sign < 0.0 {
        r.next_down()
    } else {
        r
    }
}

fn adjust_up(r: f64, err_sign: f64) -> f64 {
    if !r.is_finite() {
        return if r == f64::NEG_INFINITY { f64::MIN } else { r };
    }
    if err_sign > 0.0 {
        r.next_up()
    } else {
        r
    }
}

fn mul_err(a: f64, b: f64, p: f64) -> f64 {
    // Underflow makes the fma residual unreliable; treat as inexact in
    // both directions.
    if p != 0.0 && p.abs() < f64::MIN_POSITIVE * 4.0 {
        return f64::NAN;
    }
    if p == 0.0 && a != 0.0 && b != 0.0 {
        return f64::NAN;
    }
    a.mul_add(b, -p)
}

fn widen_if_nan(r: f64, err: f64, up: bool) -> f64 {
    if err.is_nan() {
        if up {
            r.next_up()
        } else {
            r.next_down()
        }
    } else if up {
        adjust_up(r, err)
    } else {
        adjust_down(r, err)
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn from_rational_down(r: &Rational) -> Self {
        let mut f = <f64 as Scalar>::from_rational(r);
        while f.is_finite() && from_f64_exact(f).map_or(false, |q| &q > r) {
            f = f.next_down();
        }
        if f == f64::INFINITY {
            f64::MAX
        } else {
            f
        }
    }
    fn from_rational_up(r: &Rational) -> Self {
        let mut f = <f64 as Scalar>::from_rational(r);
        while f.is_finite() && from_f64_exact(f).map_or(false, |q| &q < r) {
            f = f.next_up();
        }
        if f == f64::NEG_INFINITY {
            f64::MIN
        } else {
            f
        }
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_f64_up(&self) -> f64 {
        *self
    }
    fn to_f64_down(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn add_down(&self, rhs: &Self) -> Self {
        let s = self + rhs;
        adjust_down(s, two_sum_err(*self, *rhs, s))
    }
    fn add_up(&self, rhs: &Self) -> Self {
        let s = self + rhs;
        adjust_up(s, two_sum_err(*self, *rhs, s))
    }
    fn mul_down(&self, rhs: &Self) -> Self {
        let p = self * rhs;
        widen_if_nan(p, mul_err(*self, *rhs, p), false)
    }
    fn mul_up(&self, rhs: &Self) -> Self {
        let p = self * rhs;
        widen_if_nan(p, mul_err(*self, *rhs, p), true)
    }
    fn div_down(&self, rhs: &Self) -> Self {
        let q = self / rhs;
        widen_if_nan(q, div_err(*self, *rhs, q), false)
    }
    fn div_up(&self, rhs: &Self) -> Self {
        let q = self / rhs;
        widen_if_nan(q, div_err(*self, *rhs, q), true)
    }
}

/// Sign of (a/b - q), or NaN when it cannot be determined reliably.
fn div_err(a: f64, b: f64, q: f64) -> f64 {
    if !q.is_finite() || q == 0.0 && a != 0.0 || q != 0.0 && q.abs() < f64::MIN_POSITIVE * 4.0 {
        return f64::NAN;
    }
    // r = a - q*b exactly; a/b - q = r/b.
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        0.0
    } else if (r > 0.0) == (b > 0.0) {
        1.0
    } else {
        -1.0
    }
}

/// The exact rational value of a finite double. Used only where a float
/// result has to be re-checked in exact arithmetic.
pub fn from_f64_exact(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}

/// True when `r` is exactly a binary64 number.
pub fn is_binary64(r: &Rational) -> bool {
    match ToPrimitive::to_f64(r) {
        Some(f) if f.is_finite() => from_f64_exact(f).as_ref() == Some(r),
        _ => false,
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 2^e as an exact rational (e may be negative).
pub fn pow2(e: i32) -> Rational {
    let two = BigInt::from(2);
    if e >= 0 {
        Rational::from_integer(num_traits::pow(two, e as usize))
    } else {
        Rational::new(BigInt::one(), num_traits::pow(two, (-e) as usize))
    }
}

/// Parse a decimal or scientific literal (`331.`, `.5`, `42.7e-7`,
/// `-1.5E+3`) into its exact rational value.
pub fn parse_decimal(text: &str) -> Option<Rational> {
    let s = text.trim();
    let (neg, s) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let scale = exp - frac_part.len() as i64;
    if scale.abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Some(r)
}

/// Short decimal rendering for reports (`5.329e-13`).
pub fn format_sci(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.4e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(parse_decimal("0.6").unwrap(), rat(3, 5));
        assert_eq!(parse_decimal("331.").unwrap(), rat_int(331));
        assert_eq!(parse_decimal(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_decimal("42.7e-7").unwrap(), rat(427, 100_000_000));
        assert_eq!(parse_decimal("-1.5E+3").unwrap(), rat_int(-1500));
        assert!(parse_decimal(".").is_none());
        assert!(parse_decimal("1.2.3").is_none());
        assert!(parse_decimal("").is_none());
    }

    #[test]
    fn representability() {
        assert!(is_binary64(&rat(1, 8)));
        assert!(is_binary64(&rat_int(331)));
        assert!(!is_binary64(&rat(3, 5)));
        assert!(!is_binary64(&rat(1, 3)));
        assert!(is_binary64(&pow2(-53)));
    }

    #[test]
    fn directed_conversions_bracket() {
        for r in [rat(1, 3), rat(-2, 7), rat(3, 5), rat_int(1), pow2(-60)] {
            let lo = f64::from_rational_down(&r);
            let hi = f64::from_rational_up(&r);
            assert!(from_f64_exact(lo).unwrap() <= r);
            assert!(from_f64_exact(hi).unwrap() >= r);
            assert!(hi.next_down() <= lo);
        }
    }

    #[test]
    fn directed_ops_bracket_exact_results() {
        let vals = [0.1, 1.0 / 3.0, -2.5, 7.0, 1e-300, -3.3e10];
        for &a in &vals {
            for &b in &vals {
                let (ra, rb) = (from_f64_exact(a).unwrap(), from_f64_exact(b).unwrap());
                let check = |lo: f64, hi: f64, exact: Rational| {
                    // infinite endpoints are trivially sound
                    if let Some(l) = from_f64_exact(lo) {
                        assert!(l <= exact, "{a} {b}");
                    }
                    if let Some(h) = from_f64_exact(hi) {
                        assert!(h >= exact, "{a} {b}");
                    }
                    assert!(lo <= hi);
                };
                check(a.add_down(&b), a.add_up(&b), &ra + &rb);
                check(a.mul_down(&b), a.mul_up(&b), &ra * &rb);
                check(a.div_down(&b), a.div_up(&b), &ra / &rb);
            }
        }
        // exact operations do not widen
        assert_eq!(0.5f64.add_up(&0.25), 0.75);
        assert_eq!(0.0f64.mul_down(&3.0), 0.0);
    }
}
