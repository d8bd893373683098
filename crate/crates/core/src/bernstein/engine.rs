use std::time::Instant;

use super::bounds::{convergence_bound, linear_error_bound_rational, linear_error_sums};
use crate::algebra::{MultiIndex, Polynomial, Rational, RationalFunction, Scalar};
use crate::error::{Error, Result};
use crate::report::{combine, opt_lower, opt_upper, CertificateStatus, Method, ReportEntry, Value};
use crate::round_model::{bound_remainder, ErrorForm, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernOptions {
    /// Uniform multi-degree override; by default the per-variable degrees of
    /// the problem are used.
    pub degree: Option<u32>,
    /// Degree elevations tried in the rational case before giving up.
    pub max_elevations: u32,
}

impl Default for BernOptions {
    fn default() -> Self {
        BernOptions { degree: None, max_elevations: 3 }
    }
}

/// Rewrite a polynomial over the input box as one over `[0,1]^n`.
pub fn to_unit_box(p: &Polynomial<Rational>, prog: &Program) -> Polynomial<Rational> {
    let mut out = p.clone();
    for (i, v) in prog.vars.iter().enumerate() {
        out = out.affine_substitute(i, &v.lo, &v.hi).expect("variable index within range");
    }
    out
}

fn join_all<'a>(n: usize, it: impl IntoIterator<Item = &'a Polynomial<Rational>>) -> MultiIndex {
    it.into_iter().fold(MultiIndex::zero(n), |acc, p| acc.join(&p.multi_degree()))
}

fn uniform_override(k: u32, needed: &MultiIndex) -> Result<MultiIndex> {
    let kk = MultiIndex::uniform(needed.len(), k);
    if needed.le(&kk) != Some(true) {
        return Err(Error::DegreeTooLow { requested: kk.as_slice().to_vec(), source_degree: needed.as_slice().to_vec() });
    }
    Ok(kk)
}

/// FPBern: bound the linear part with Bernstein coefficients of every s_j
/// on the unit box, the remainder with Taylor-model interval arithmetic,
/// and add the two.
pub fn fpbern_run<S: Scalar>(prog: &Program, ef: &ErrorForm, opts: &BernOptions) -> Result<ReportEntry> {
    if prog.has_constraints() {
        return Err(Error::ConstraintsUnsupported);
    }
    let start = Instant::now();
    let n = ef.n;
    let eps = S::from_rational_up(&ef.eps);

    let mut sharp = None;
    let mut elevations = None;
    let mut convergence = None;
    let (lbar, k_used): (Option<S>, MultiIndex) = if ef.is_polynomial() {
        let s: Vec<Polynomial<Rational>> = ef.p.iter().map(|p| to_unit_box(p, prog)).collect();
        let needed = join_all(n, s.iter()).join(&ef.f.num().multi_degree());
        let k = match opts.degree {
            Some(d) => uniform_override(d, &needed)?,
            None => needed,
        };
        let sums = linear_error_sums::<S>(&s, &k)?;
        let mut best = S::zero();
        let mut at_corner = false;
        for (alpha, v) in MultiIndex::grid(&k).zip(&sums) {
            if *v > best {
                best = v.clone();
                at_corner = alpha.is_corner_of(&k);
            } else if *v == best && alpha.is_corner_of(&k) {
                at_corner = true;
            }
        }
        // A maximal sum at a vertex is attained by l' there (choose the
        // signs of e), so the bound is exact.
        sharp = Some(at_corner && S::is_exact());
        let kmax = k.as_slice().iter().copied().max().unwrap_or(0).max(1);
        if ef.m > 0 && kmax >= s.iter().map(Polynomial::total_degree).max().unwrap_or(0) {
            convergence = Some(Value::upper(&convergence_bound(&s, kmax)));
        }
        (Some(best), k)
    } else {
        let q2 = to_unit_box(&ef.q_squared(), prog);
        let s: Vec<RationalFunction<Rational>> = ef
            .p
            .iter()
            .map(|p| RationalFunction::new(to_unit_box(p, prog), q2.clone()))
            .collect::<Result<_>>()?;
        let actual = join_all(n, ef.p.iter()).join(&q2.multi_degree());
        let k = match opts.degree {
            Some(d) => uniform_override(d, &actual)?,
            None => {
                let fd = ef.f.num().multi_degree().join(&ef.f.den().multi_degree());
                let doubled = MultiIndex::from_vec(fd.as_slice().iter().map(|d| 2 * d).collect());
                doubled.join(&actual)
            }
        };
        let r = linear_error_bound_rational::<S>(&s, &k, opts.max_elevations)?;
        elevations = Some(r.elevations);
        (r.bound, r.k_used)
    };

    let h = bound_remainder::<S>(ef, &prog.input_box())?;
    let neg = lbar.clone().map(|l| -l);
    let t = combine(&eps, neg.as_ref(), lbar.as_ref(), &h);
    Ok(ReportEntry {
        name: prog.name.clone(),
        method: Method::Bern,
        backend: S::BACKEND,
        n,
        m: ef.m,
        d: ef.degree(),
        k: k_used.as_slice().to_vec(),
        eps: Value::upper(&eps),
        linear_lo: opt_lower(neg.as_ref()),
        linear_hi: opt_upper(lbar.as_ref()),
        remainder_lo: Value::lower(h.lo()),
        remainder_hi: Value::upper(h.hi()),
        total: opt_upper(t.total.as_ref()),
        sharp_lower: sharp,
        sharp_upper: sharp,
        elevations,
        lp: None,
        convergence_gap: convergence,
        wall_time_secs: start.elapsed().as_secs_f64(),
        certificate: CertificateStatus::NotApplicable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{pow2, rat_int, Backend};
    use crate::round_model::{default_eps, parse_program, ConstantPolicy};

    fn run<S: Scalar>(src: &str, opts: &BernOptions) -> ReportEntry {
        let p = parse_program(src).unwrap();
        let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
        fpbern_run::<S>(&p, &ef, opts).unwrap()
    }

    #[test]
    fn overview_linear_bound_is_two() {
        let r = run::<Rational>("name: overview\nvars: x in [0,1];\nexpr: x*x - x", &BernOptions::default());
        assert_eq!(r.linear_hi.as_rational(), Some(rat_int(2)));
        assert_eq!(r.linear_lo.as_rational(), Some(rat_int(-2)));
        assert_eq!(r.k, vec![2]);
        assert_eq!(r.m, 3);
        assert_eq!(r.backend, Backend::Exact);
        let total = r.total.as_rational().unwrap();
        let two_eps = pow2(-52);
        assert!(total >= two_eps && total < &two_eps * rat_int(2));
    }

    #[test]
    fn float_backend_agrees() {
        let src = "vars: x in [-1,2]; y in [0,3]; expr: x*y*y - 3*x + y";
        let a = run::<Rational>(src, &BernOptions::default());
        let b = run::<f64>(src, &BernOptions::default());
        let (ta, tb) = (a.total.as_f64(), b.total.as_f64());
        assert!(((ta - tb) / ta).abs() < 1e-9, "{ta} vs {tb}");
        assert!(tb >= ta);
    }

    #[test]
    fn rational_program_runs() {
        let r = run::<Rational>("vars: x in [0.1,0.3]; expr: 4*x/(1 + x/1.11)", &BernOptions::default());
        assert!(r.total.is_finite());
        assert_eq!(r.elevations, Some(0));
    }

    #[test]
    fn degree_override_below_needed_fails() {
        let p = parse_program("vars: x in [0,1]; expr: x*x*x").unwrap();
        let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
        let opts = BernOptions { degree: Some(2), ..Default::default() };
        assert!(matches!(fpbern_run::<Rational>(&p, &ef, &opts), Err(Error::DegreeTooLow { .. })));
    }

    #[test]
    fn constraints_are_rejected() {
        let p = parse_program("vars: x in [0,1]; constraints: 0 <= x - x*x; expr: x*x").unwrap();
        let ef = ErrorForm::from_program(&p, ConstantPolicy::NonRepresentable, default_eps()).unwrap();
        assert_eq!(fpbern_run::<f64>(&p, &ef, &BernOptions::default()).unwrap_err(), Error::ConstraintsUnsupported);
    }
}
