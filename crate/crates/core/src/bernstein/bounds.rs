use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::expansion::{bernstein_coeffs, binomial, degree_elevate, BernsteinExpansion};
use crate::algebra::{MultiIndex, Polynomial, Rational, RationalFunction, Scalar};
use crate::error::Result;
use crate::par;

/// Per-index sums Σ_j |b_α(s_j)| (rounded up), in grid order of `k`.
///
/// Each s_j is expanded on its own; l' is never expanded jointly in (x, e).
pub fn linear_error_sums<S: Scalar>(s: &[Polynomial<Rational>], k: &MultiIndex) -> Result<Vec<S>> {
    let len = MultiIndex::grid_len(k);
    let mags: Vec<Result<Vec<S>>> = par::map(s, |sj| {
        let e = bernstein_coeffs::<S>(sj, k)?;
        Ok((0..e.len()).map(|pos| e.mag_at(pos)).collect())
    });
    let mut acc = vec![S::zero(); len];
    for m in mags {
        for (a, v) in acc.iter_mut().zip(m?) {
            *a = a.add_up(&v);
        }
    }
    Ok(acc)
}

/// l̄'_k = max_α Σ_j |b_α(s_j)|, so that |l'(x, e)| <= l̄'_k on the unit box
/// times [-1, 1]^m.
pub fn linear_error_bound_poly<S: Scalar>(s: &[Polynomial<Rational>], k: &MultiIndex) -> Result<S> {
    Ok(linear_error_sums::<S>(s, k)?.into_iter().fold(S::zero(), S::max_of))
}

/// Outcome of the rational-case bound: `bound == None` means +∞ (some
/// denominator coefficient stayed nonpositive through every elevation).
#[derive(Clone, Debug, PartialEq)]
pub struct RationalLinearBound<S> {
    pub bound: Option<S>,
    pub k_used: MultiIndex,
    pub elevations: u32,
}

/// l̄'_k = max_α Σ_j |b_α(p_j)| / |b_α(q_j²)| for s_j = p_j / q_j².
///
/// If a denominator has a nonpositive Bernstein coefficient, all expansions
/// are elevated uniformly by one and the check repeated, at most
/// `max_elevations` times.
pub fn linear_error_bound_rational<S: Scalar>(
    s: &[RationalFunction<Rational>],
    k: &MultiIndex,
    max_elevations: u32,
) -> Result<RationalLinearBound<S>> {
    // The s_j usually share one denominator; expand each distinct one once.
    let mut dens: Vec<&Polynomial<Rational>> = Vec::new();
    let den_of: Vec<usize> = s
        .iter()
        .map(|r| match dens.iter().position(|d| *d == r.den()) {
            Some(i) => i,
            None => {
                dens.push(r.den());
                dens.len() - 1
            }
        })
        .collect();
    let mut nums: Vec<BernsteinExpansion<S>> =
        par::map(s, |r| bernstein_coeffs::<S>(r.num(), k)).into_iter().collect::<Result<_>>()?;
    let mut den_exps: Vec<BernsteinExpansion<S>> =
        dens.iter().map(|d| bernstein_coeffs::<S>(d, k)).collect::<Result<_>>()?;
    let mut kk = k.clone();
    let mut elevations = 0;
    loop {
        let positive = den_exps.iter().all(|d| d.lower_coeffs().iter().all(|c| *c > S::zero()));
        if positive {
            break;
        }
        if elevations == max_elevations {
            return Ok(RationalLinearBound { bound: None, k_used: kk, elevations });
        }
        elevations += 1;
        kk = MultiIndex::from_vec(kk.as_slice().iter().map(|d| d + 1).collect());
        let target = kk.clone();
        nums = par::map(&nums, |e| degree_elevate(e, &target)).into_iter().collect::<Result<_>>()?;
        den_exps = den_exps.iter().map(|e| degree_elevate(e, &kk)).collect::<Result<_>>()?;
    }
    let len = MultiIndex::grid_len(&kk);
    let mut acc = vec![S::zero(); len];
    for (num, &di) in nums.iter().zip(&den_of) {
        let den = &den_exps[di];
        for (pos, a) in acc.iter_mut().enumerate() {
            let q = &den.lower_coeffs()[pos];
            *a = a.add_up(&num.mag_at(pos).div_up(q));
        }
    }
    let bound = acc.into_iter().fold(S::zero(), S::max_of);
    Ok(RationalLinearBound { bound: Some(bound), k_used: kk, elevations })
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// L(s) = max_α |s_α| · α_1! ⋯ α_n! / |α|!.
pub fn lipschitz_constant(s: &Polynomial<Rational>) -> Rational {
    s.terms()
        .map(|(alpha, c)| {
            let num: BigInt = alpha.as_slice().iter().map(|&a| factorial(a)).product();
            Signed::abs(c) * Rational::new(num, factorial(alpha.total()))
        })
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Theoretical gap (3 L_m / k) · C(d+1, 3) · n^d between the uniform-degree
/// Bernstein bound and the true minimum of l', valid for k >= d, where
/// L_m = Σ_j L(s_j), d the largest total degree and n the number of
/// variables. Purely diagnostic.
pub fn convergence_bound(s: &[Polynomial<Rational>], k: u32) -> Rational {
    let Some(first) = s.first() else {
        return Rational::zero();
    };
    assert!(k > 0, "convergence bound needs k >= 1");
    let n = first.nvars() as u32;
    let d = s.iter().map(Polynomial::total_degree).max().unwrap_or(0);
    let lm: Rational = s.iter().map(lipschitz_constant).sum();
    let c = binomial(d + 1, 3) * BigInt::from(n).pow(d);
    lm * Rational::from_integer(BigInt::from(3)) * Rational::from_integer(c) / Rational::from_integer(BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    fn x() -> Polynomial<Rational> {
        Polynomial::var(1, 0)
    }

    #[test]
    fn overview_sums() {
        let x = x();
        let x2 = &x * &x;
        let s = vec![&x2.scale(&rat_int(2)) - &x, x2.clone(), &x2 - &x];
        let k = MultiIndex::uniform(1, 2);
        assert_eq!(linear_error_sums::<Rational>(&s, &k).unwrap(), vec![rat_int(0), rat_int(1), rat_int(2)]);
        assert_eq!(linear_error_bound_poly::<Rational>(&s, &k).unwrap(), rat_int(2));
        assert_eq!(linear_error_bound_poly::<f64>(&s, &k).unwrap(), 2.0);
    }

    #[test]
    fn small_cases() {
        let one = vec![Polynomial::one(1)];
        assert_eq!(linear_error_bound_poly::<Rational>(&one, &MultiIndex::uniform(1, 0)).unwrap(), rat_int(1));
        let s = vec![x(), -&x()];
        assert_eq!(linear_error_bound_poly::<Rational>(&s, &MultiIndex::uniform(1, 1)).unwrap(), rat_int(2));
    }

    #[test]
    fn rational_bound_with_square_denominator() {
        let x = x();
        let q = &Polynomial::one(1) + &x;
        let s = vec![RationalFunction::new(x.clone(), &q * &q).unwrap()];
        let r = linear_error_bound_rational::<Rational>(&s, &MultiIndex::uniform(1, 2), 3).unwrap();
        assert_eq!(r.bound, Some(rat(1, 4)));
        assert_eq!(r.elevations, 0);
    }

    #[test]
    fn rational_reduces_to_polynomial() {
        let x = x();
        let polys = vec![&(&x * &x) - &x, x.scale(&rat(3, 1))];
        let s: Vec<_> = polys.iter().map(|p| RationalFunction::from_poly(p.clone())).collect();
        let k = MultiIndex::uniform(1, 2);
        let r = linear_error_bound_rational::<Rational>(&s, &k, 3).unwrap();
        assert_eq!(r.bound.unwrap(), linear_error_bound_poly::<Rational>(&polys, &k).unwrap());
    }

    #[test]
    fn vanishing_denominator_gives_infinity() {
        // den = x vanishes at 0: the first coefficient is 0 at every degree.
        let s = vec![RationalFunction::new(Polynomial::one(1), x()).unwrap()];
        let r = linear_error_bound_rational::<Rational>(&s, &MultiIndex::uniform(1, 1), 3).unwrap();
        assert_eq!(r.bound, None);
        assert_eq!(r.elevations, 3);
        assert_eq!(r.k_used, MultiIndex::uniform(1, 4));
    }

    #[test]
    fn elevation_rescues_an_indefinite_looking_denominator() {
        // (x - 1/2)^2 + 1/16 > 0 but its degree-2 middle coefficient is negative.
        let x = x();
        let t = &x - &Polynomial::constant(1, rat(1, 2));
        let den = &(&t * &t) + &Polynomial::constant(1, rat(1, 16));
        let s = vec![RationalFunction::new(Polynomial::one(1), den).unwrap()];
        let r = linear_error_bound_rational::<Rational>(&s, &MultiIndex::uniform(1, 2), 3).unwrap();
        assert!(r.elevations > 0);
        assert!(r.bound.is_some());
    }

    #[test]
    fn convergence_diagnostic() {
        assert_eq!(convergence_bound(&[x()], 1), rat_int(0));
        let x2 = &x() * &x();
        assert_eq!(lipschitz_constant(&x2), rat_int(1));
        let c2 = convergence_bound(std::slice::from_ref(&x2), 2);
        assert_eq!(c2, rat(3, 2));
        assert_eq!(convergence_bound(std::slice::from_ref(&x2), 4), c2 / rat_int(2));
    }
}
