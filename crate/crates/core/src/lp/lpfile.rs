//! Export to, and import from, the textual LP file format understood by
//! CPLEX, Gurobi, HiGHS, SCIP and others.
//!
//! Coefficients with a terminating decimal expansion (all dyadic ones, as
//! produced for box-constrained programs) are written exactly; others are
//! written with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::problem::{Column, LpProblem, Sense};
use crate::algebra::{parse_decimal, Rational};
use crate::error::{Error, Result};

/// Decimal text of `r`, and whether it is exact.
pub fn decimal_string(r: &Rational) -> (String, bool) {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        let f = r.to_f64().unwrap_or(f64::NAN);
        return (format!("{f:e}"), false);
    }
    let digits = twos.max(fives);
    let scaled = r * Rational::from_integer(BigInt::from(10).pow(digits));
    let int = scaled.to_integer();
    if digits == 0 {
        return (int.to_string(), true);
    }
    let neg = int.is_negative();
    let mut s = int.abs().to_string();
    while s.len() <= digits as usize {
        s.insert(0, '0');
    }
    s.insert(s.len() - digits as usize, '.');
    if neg {
        s.insert(0, '-');
    }
    (s, true)
}

/// Render `lp` in LP format. The free variable is `t`; λ_c is `l<c>`.
pub fn write_lp(lp: &LpProblem) -> String {
    let mut rows: Vec<Vec<(String, &Rational)>> = vec![Vec::new(); lp.nrows];
    for (r, v) in &lp.t_col {
        rows[*r].push(("t".to_string(), v));
    }
    let mut out = String::new();
    out.push_str("\\ exported by fpcert\n");
    out.push_str(match lp.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj: t\nSubject To\n");
    let mut entries: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); lp.nrows];
    for c in 0..lp.num_lambdas() {
        lp.for_each_in_column(c, |r, v| entries[r].push((c, v.clone())));
    }
    for r in 0..lp.nrows {
        let _ = write!(out, " c{r}:");
        let mut n = 0;
        for (name, v) in &rows[r] {
            write_term(&mut out, v, name);
            n += 1;
        }
        for (c, v) in &entries[r] {
            write_term(&mut out, v, &format!("l{c}"));
            n += 1;
            if n % 8 == 0 {
                out.push_str("\n   ");
            }
        }
        if n == 0 {
            out.push_str(" 0 t");
        }
        let _ = writeln!(out, " = {}", decimal_string(&lp.rhs[r]).0);
    }
    out.push_str("Bounds\n t free\nEnd\n");
    out
}

fn write_term(out: &mut String, v: &Rational, name: &str) {
    let (s, _) = decimal_string(&v.abs());
    let sign = if v.is_negative() { '-' } else { '+' };
    let _ = write!(out, " {sign} {s} {name}");
}

#[derive(PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Bounds,
    End,
}

fn lambda_index(name: &str) -> Option<usize> {
    name.strip_prefix('l')?.parse().ok()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::LpFormat(msg.into())
}

/// Parse an LP file of the shape written by [`write_lp`]: one free
/// objective variable, nonnegative `l<c>` variables and equality rows.
pub fn parse_lp(text: &str) -> Result<LpProblem> {
    let mut section = Section::Start;
    let mut sense = None;
    let mut objective: Vec<(String, Rational)> = Vec::new();
    let mut rows: Vec<(Vec<(String, Rational)>, Rational)> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut free: Vec<String> = Vec::new();

    for raw in text.lines() {
        let line = raw.split('\\').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        let header = match lower.as_str() {
            "maximize" | "maximise" | "maximum" | "max" => Some((Section::Objective, Some(Sense::Maximize))),
            "minimize" | "minimise" | "minimum" | "min" => Some((Section::Objective, Some(Sense::Minimize))),
            "subject to" | "such that" | "st" | "s.t." => Some((Section::Constraints, None)),
            "bounds" => Some((Section::Bounds, None)),
            "end" => Some((Section::End, None)),
            _ => None,
        };
        if let Some((s, sn)) = header {
            if !pending.is_empty() {
                return Err(bad("constraint without a right-hand side"));
            }
            if sn.is_some() {
                sense = sn;
            }
            section = s;
            continue;
        }
        match section {
            Section::Start => return Err(bad(format!("content before the objective section: `{line}`"))),
            Section::End => return Err(bad("content after End")),
            Section::Objective => {
                let toks = strip_label(line);
                objective.extend(parse_terms(&toks)?);
            }
            Section::Constraints => {
                pending.extend(strip_label(line));
                if let Some(pos) = pending.iter().position(|t| t == "=") {
                    if pos + 2 != pending.len() {
                        return Err(bad("expected `= <number>` at the end of a row"));
                    }
                    let rhs = parse_number(&pending[pos + 1])?;
                    let terms = parse_terms(&pending[..pos])?;
                    rows.push((terms, rhs));
                    pending.clear();
                } else if pending.iter().any(|t| t == "<=" || t == ">=" || t == "<" || t == ">") {
                    return Err(bad("only equality rows are supported"));
                }
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks.as_slice() {
                    [v, f] if f.eq_ignore_ascii_case("free") => free.push(v.to_string()),
                    [v, ">=", z] if parse_number(z)?.is_zero() => {
                        if lambda_index(v).is_none() {
                            return Err(bad(format!("unexpected bound on `{v}`")));
                        }
                    }
                    _ => return Err(bad(format!("unsupported bound `{line}`"))),
                }
            }
        }
    }
    if section != Section::End {
        return Err(bad("missing End"));
    }
    let sense = sense.ok_or_else(|| bad("missing objective sense"))?;
    let [(tname, tcoef)] = objective.as_slice() else {
        return Err(bad("objective must be a single variable"));
    };
    if !tcoef.is_one() {
        return Err(bad("objective coefficient must be 1"));
    }
    if free != [tname.clone()] {
        return Err(bad(format!("exactly the objective variable `{tname}` must be free")));
    }

    let nrows = rows.len();
    let mut t_col: Column = Vec::new();
    let mut cols: BTreeMap<usize, Column> = BTreeMap::new();
    let mut rhs = Vec::with_capacity(nrows);
    for (r, (terms, b)) in rows.into_iter().enumerate() {
        let mut acc: BTreeMap<Option<usize>, Rational> = BTreeMap::new();
        for (name, v) in terms {
            let key = if &name == tname {
                None
            } else {
                Some(lambda_index(&name).ok_or_else(|| bad(format!("unknown variable `{name}`")))?)
            };
            *acc.entry(key).or_insert_with(Rational::zero) += v;
        }
        for (key, v) in acc {
            if v.is_zero() {
                continue;
            }
            match key {
                None => t_col.push((r, v)),
                Some(c) => cols.entry(c).or_default().push((r, v)),
            }
        }
        rhs.push(b);
    }
    let ncols = cols.keys().next_back().map_or(0, |c| c + 1);
    let columns: Vec<Column> = (0..ncols).map(|c| cols.remove(&c).unwrap_or_default()).collect();
    Ok(LpProblem::new(sense, nrows, t_col, columns, rhs))
}

fn strip_label(line: &str) -> Vec<String> {
    let body = match line.split_once(':') {
        Some((label, rest)) if !label.trim().contains(' ') => rest,
        _ => line,
    };
    body.split_whitespace().map(str::to_string).collect()
}

fn parse_number(s: &str) -> Result<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let v = parse_decimal(body).ok_or_else(|| bad(format!("bad number `{s}`")))?;
    Ok(if neg { -v } else { v })
}

fn is_number(s: &str) -> bool {
    s.trim_start_matches(['+', '-']).starts_with(|c: char| c.is_ascii_digit() || c == '.')
}

fn parse_terms(toks: &[String]) -> Result<Vec<(String, Rational)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let mut coef = Rational::from_integer(BigInt::from(1));
        if toks[i] == "+" || toks[i] == "-" {
            if toks[i] == "-" {
                coef = -coef;
            }
            i += 1;
        }
        if i < toks.len() && is_number(&toks[i]) {
            coef *= parse_number(&toks[i])?;
            i += 1;
        }
        let name = toks.get(i).ok_or_else(|| bad("dangling coefficient"))?;
        if is_number(name) || name == "+" || name == "-" {
            return Err(bad(format!("expected a variable name, found `{name}`")));
        }
        out.push((name.clone(), coef));
        i += 1;
    }
    Ok(out)
}
