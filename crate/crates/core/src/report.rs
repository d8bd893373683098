//! Analysis results and their JSON form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_decimal, Backend, Interval, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bern,
    Ks,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bern => "bern",
            Method::Ks => "ks",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bern" | "fpbern" => Ok(Method::Bern),
            "ks" | "fpkristen" | "krivine" => Ok(Method::Ks),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// A reported number: a decimal string (the double rounded in the safe
/// direction for the quantity) and, in the exact backend, the exact rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Value {
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

impl Value {
    /// An upper bound: the decimal is rounded up.
    pub fn upper<S: Scalar>(v: &S) -> Self {
        Value { decimal: fmt_f64(v.to_f64_up()), exact: v.exact_string() }
    }

    /// A lower bound: the decimal is rounded down.
    pub fn lower<S: Scalar>(v: &S) -> Self {
        Value { decimal: fmt_f64(v.to_f64_down()), exact: v.exact_string() }
    }

    pub fn infinite() -> Self {
        Value { decimal: "inf".into(), exact: None }
    }

    pub fn neg_infinite() -> Self {
        Value { decimal: "-inf".into(), exact: None }
    }

    pub fn from_rational(r: &Rational) -> Self {
        Value::upper(r)
    }

    pub fn as_f64(&self) -> f64 {
        self.decimal.parse().unwrap_or(f64::NAN)
    }

    /// Exact value if recorded, otherwise the value of the decimal string.
    pub fn as_rational(&self) -> Option<Rational> {
        match &self.exact {
            Some(s) => parse_rational(s),
            None => parse_decimal(&self.decimal),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_f64().is_finite()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal)
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // `{:e}` prints the shortest string that parses back to the same double.
    format!("{v:e}")
}

/// Parse `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n = n.trim().parse().ok()?;
            let d: num_bigint::BigInt = d.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&d) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpDims {
    pub columns: usize,
    pub rows: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateStatus {
    /// No LP certificate involved (Bernstein engine).
    NotApplicable,
    /// Residual of the certificate is exactly zero.
    Verified,
    /// Float certificate with a nonzero residual, bound repaired.
    Repaired,
    /// No error variables: nothing to certify.
    Trivial,
}

/// One analysis of one program by one engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub method: Method,
    pub backend: Backend,
    pub n: usize,
    pub m: usize,
    /// deg l' = deg f + 1.
    pub d: u32,
    /// Multi-degree (Bernstein) or relaxation order (Krivine-Stengle).
    pub k: Vec<u32>,
    pub eps: Value,
    /// Bounds on l' = l / ε over the input domain and [-1, 1]^m.
    pub linear_lo: Value,
    pub linear_hi: Value,
    pub remainder_lo: Value,
    pub remainder_hi: Value,
    /// max(|lo|, |hi|) of ε·[linear_lo, linear_hi] + [remainder_lo, remainder_hi].
    pub total: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp_lower: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharp_upper: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elevations: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp: Option<LpDims>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_gap: Option<Value>,
    pub wall_time_secs: f64,
    pub certificate: CertificateStatus,
}

impl ReportEntry {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn total_f64(&self) -> f64 {
        self.total.as_f64()
    }
}

/// Magnitude of the final error interval ε·[l_lo, l_hi] + h, with directed
/// rounding. `None` linear bounds mean unbounded.
pub(crate) struct Totals<S> {
    pub total: Option<S>,
}

pub(crate) fn combine<S: Scalar>(eps: &S, l_lo: Option<&S>, l_hi: Option<&S>, h: &Interval<S>) -> Totals<S> {
    let lo = l_lo.map(|l| eps_times(eps, l, false).add_down(h.lo()));
    let hi = l_hi.map(|l| eps_times(eps, l, true).add_up(h.hi()));
    let total = match (&lo, &hi) {
        (Some(a), Some(b)) => Some(S::max_of(a.abs(), b.abs())),
        _ => None,
    };
    Totals { total }
}

fn eps_times<S: Scalar>(eps: &S, l: &S, up: bool) -> S {
    if up {
        eps.mul_up(l)
    } else {
        eps.mul_down(l)
    }
}

pub(crate) fn opt_upper<S: Scalar>(v: Option<&S>) -> Value {
    v.map_or_else(Value::infinite, Value::upper)
}

pub(crate) fn opt_lower<S: Scalar>(v: Option<&S>) -> Value {
    v.map_or_else(Value::neg_infinite, Value::lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn values_round_in_the_safe_direction() {
        let third = rat(1, 3);
        let up = Value::upper(&third).as_f64();
        let down = Value::lower(&third).as_f64();
        assert!(down < up);
        assert_eq!(Value::upper(&third).as_rational(), Some(third));
        assert_eq!(Value::upper(&0.1f64).exact, None);
    }

    #[test]
    fn rational_strings_parse() {
        assert_eq!(parse_rational("-3/6"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("7"), Some(rat(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
