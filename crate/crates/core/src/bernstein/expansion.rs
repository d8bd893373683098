use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{Interval, MultiIndex, Polynomial, Rational, Scalar};
use crate::error::{Error, Result};

/// Bernstein coefficients of a polynomial on the unit box `[0,1]^n`,
/// stored as a dense row-major tensor over `α <= k`.
///
/// In the exact backend every coefficient is a single rational. In the
/// float backend each coefficient is an outward-rounded interval, so
/// enclosures derived from it stay sound.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinExpansion<S> {
    k: MultiIndex,
    source_degree: MultiIndex,
    lo: Vec<S>,
    hi: Option<Vec<S>>,
}

/// Range enclosure read off a Bernstein expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct BernBound<S> {
    pub lower: S,
    pub upper: S,
    pub sharp_lower: bool,
    pub sharp_upper: bool,
    pub k_used: MultiIndex,
}

impl<S: Scalar> BernsteinExpansion<S> {
    pub fn k(&self) -> &MultiIndex {
        &self.k
    }

    pub fn source_degree(&self) -> &MultiIndex {
        &self.source_degree
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    /// Lower endpoints of the coefficients (the coefficients themselves in
    /// the exact backend).
    pub fn lower_coeffs(&self) -> &[S] {
        &self.lo
    }

    pub fn upper_coeffs(&self) -> &[S] {
        self.hi.as_deref().unwrap_or(&self.lo)
    }

    pub fn coeff_at(&self, pos: usize) -> Interval<S> {
        Interval::new(self.lo[pos].clone(), self.upper_coeffs()[pos].clone())
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Interval<S> {
        self.coeff_at(alpha.grid_position(&self.k))
    }

    /// Largest coefficient magnitude at `pos`.
    pub fn mag_at(&self, pos: usize) -> S {
        let lo = self.lo[pos].abs();
        match &self.hi {
            None => lo,
            Some(hi) => S::max_of(lo, hi[pos].abs()),
        }
    }

    fn is_point_at(&self, pos: usize) -> bool {
        self.hi.as_ref().is_none_or(|hi| hi[pos] == self.lo[pos])
    }
}

/// C(a, b) as a big integer.
pub(crate) fn binomial(a: u32, b: u32) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

/// Per-axis linear map `new[α] = Σ_β w(α, β) old[β]` with nonnegative
/// rational weights.
type AxisMap = Vec<Vec<(usize, Rational)>>;

/// Power basis → Bernstein basis of degree k along one axis:
/// w(α, β) = C(α, β) / C(k, β) for β ≤ α.
fn power_to_bernstein(k: u32) -> AxisMap {
    (0..=k)
        .map(|a| {
            (0..=a)
                .map(|b| (b as usize, Rational::new(binomial(a, b), binomial(k, b))))
                .collect()
        })
        .collect()
}

/// Bernstein degree k → degree k2 along one axis:
/// w(γ, α) = C(k, α) C(k2 − k, γ − α) / C(k2, γ).
fn elevation(k: u32, k2: u32) -> AxisMap {
    let r = k2 - k;
    (0..=k2)
        .map(|g| {
            let lo = g.saturating_sub(r);
            let hi = g.min(k);
            (lo..=hi)
                .map(|a| {
                    let w = Rational::new(binomial(k, a) * binomial(r, g - a), binomial(k2, g));
                    (a as usize, w)
                })
                .collect()
        })
        .collect()
}

struct Tensor<S> {
    dims: Vec<usize>,
    lo: Vec<S>,
    hi: Option<Vec<S>>,
}

impl<S: Scalar> Tensor<S> {
    fn apply_axis(self, axis: usize, map: &AxisMap) -> Self {
        let old_len = self.dims[axis];
        let new_len = map.len();
        let outer: usize = self.dims[..axis].iter().product();
        let inner: usize = self.dims[axis + 1..].iter().product();
        let mut dims = self.dims.clone();
        dims[axis] = new_len;
        let total = outer * new_len * inner;
        if S::is_exact() {
            let w: Vec<Vec<(usize, S)>> = map
                .iter()
                .map(|row| row.iter().map(|(b, r)| (*b, S::from_rational(r))).collect())
                .collect();
            let mut lo = vec![S::zero(); total];
            for o in 0..outer {
                for (a, row) in w.iter().enumerate() {
                    for i in 0..inner {
                        let mut acc = S::zero();
                        for (b, wt) in row {
                            let x = &self.lo[(o * old_len + b) * inner + i];
                            if !x.is_zero() {
                                acc += wt.clone() * x;
                            }
                        }
                        lo[(o * new_len + a) * inner + i] = acc;
                    }
                }
            }
            return Tensor { dims, lo, hi: None };
        }
        let w: Vec<Vec<(usize, S, S)>> = map
            .iter()
            .map(|row| {
                row.iter().map(|(b, r)| (*b, S::from_rational_down(r), S::from_rational_up(r))).collect()
            })
            .collect();
        let old_hi = self.hi.as_ref().unwrap_or(&self.lo);
        let mut lo = vec![S::zero(); total];
        let mut hi = vec![S::zero(); total];
        for o in 0..outer {
            for (a, row) in w.iter().enumerate() {
                for i in 0..inner {
                    let mut acc_lo = S::zero();
                    let mut acc_hi = S::zero();
                    for (b, wl, wu) in row {
                        let idx = (o * old_len + b) * inner + i;
                        let (xl, xu) = (&self.lo[idx], &old_hi[idx]);
                        // w ∈ [wl, wu] with wl >= 0
                        let pl = if *xl >= S::zero() { wl.mul_down(xl) } else { wu.mul_down(xl) };
                        let pu = if *xu >= S::zero() { wu.mul_up(xu) } else { wl.mul_up(xu) };
                        acc_lo = acc_lo.add_down(&pl);
                        acc_hi = acc_hi.add_up(&pu);
                    }
                    let at = (o * new_len + a) * inner + i;
                    lo[at] = acc_lo;
                    hi[at] = acc_hi;
                }
            }
        }
        Tensor { dims, lo, hi: Some(hi) }
    }
}

fn check_degree(k: &MultiIndex, source: &MultiIndex) -> Result<()> {
    if k.len() != source.len() {
        return Err(Error::VarCountMismatch(k.len(), source.len()));
    }
    if source.le(k) != Some(true) {
        return Err(Error::DegreeTooLow { requested: k.as_slice().to_vec(), source_degree: source.as_slice().to_vec() });
    }
    Ok(())
}

/// Bernstein coefficients of `p` (already expressed on the unit box) at
/// multi-degree `k`: b_α = Σ_{β ≤ α} Π_i C(α_i, β_i)/C(k_i, β_i) · a_β.
///
/// The weight factors per variable, so the sum is evaluated one axis at a
/// time; the arithmetic is the same as the direct formula.
pub fn bernstein_coeffs<S: Scalar>(p: &Polynomial<Rational>, k: &MultiIndex) -> Result<BernsteinExpansion<S>> {
    let source_degree = p.multi_degree();
    check_degree(k, &source_degree)?;
    let dims: Vec<usize> = k.as_slice().iter().map(|&d| d as usize + 1).collect();
    let len = MultiIndex::grid_len(k);
    let mut lo = vec![S::zero(); len];
    let mut hi = if S::is_exact() { None } else { Some(vec![S::zero(); len]) };
    for (alpha, c) in p.terms() {
        let pos = alpha.grid_position(k);
        match &mut hi {
            None => lo[pos] = S::from_rational(c),
            Some(hi) => {
                lo[pos] = S::from_rational_down(c);
                hi[pos] = S::from_rational_up(c);
            }
        }
    }
    let mut t = Tensor { dims, lo, hi };
    for (axis, &kk) in k.as_slice().iter().enumerate() {
        if kk > 0 {
            t = t.apply_axis(axis, &power_to_bernstein(kk));
        }
    }
    Ok(BernsteinExpansion { k: k.clone(), source_degree, lo: t.lo, hi: t.hi })
}

/// Reference implementation of the coefficient formula as a direct double
/// sum over `β ≤ α` (quadratic in the number of coefficients).
pub fn bernstein_coeffs_direct(p: &Polynomial<Rational>, k: &MultiIndex) -> Result<Vec<Rational>> {
    check_degree(k, &p.multi_degree())?;
    Ok(MultiIndex::grid(k)
        .map(|alpha| {
            let mut acc = Rational::zero();
            for (beta, c) in p.terms() {
                if beta.le(&alpha) != Some(true) {
                    continue;
                }
                let mut w = c.clone();
                for i in 0..k.len() {
                    let (a, b, kk) = (alpha.get(i), beta.get(i), k.get(i));
                    w *= Rational::new(binomial(a, b), binomial(kk, b));
                }
                acc += w;
            }
            acc
        })
        .collect())
}

/// Re-express an expansion at a higher multi-degree.
pub fn degree_elevate<S: Scalar>(exp: &BernsteinExpansion<S>, k2: &MultiIndex) -> Result<BernsteinExpansion<S>> {
    check_degree(k2, &exp.k)?;
    let dims: Vec<usize> = exp.k.as_slice().iter().map(|&d| d as usize + 1).collect();
    let mut t = Tensor { dims, lo: exp.lo.clone(), hi: exp.hi.clone() };
    for axis in 0..k2.len() {
        let (k, kk) = (exp.k.get(axis), k2.get(axis));
        if kk > k {
            t = t.apply_axis(axis, &elevation(k, kk));
        }
    }
    Ok(BernsteinExpansion { k: k2.clone(), source_degree: exp.source_degree.clone(), lo: t.lo, hi: t.hi })
}

/// Min and max coefficient, with corner-based sharpness flags.
pub fn enclosure<S: Scalar>(exp: &BernsteinExpansion<S>) -> BernBound<S> {
    let up = exp.upper_coeffs();
    let mut lower = exp.lo[0].clone();
    let mut upper = up[0].clone();
    for (l, u) in exp.lo.iter().zip(up) {
        if *l < lower {
            lower = l.clone();
        }
        if *u > upper {
            upper = u.clone();
        }
    }
    let mut sharp_lower = false;
    let mut sharp_upper = false;
    for (pos, alpha) in MultiIndex::grid(&exp.k).enumerate() {
        if !alpha.is_corner_of(&exp.k) || !exp.is_point_at(pos) {
            continue;
        }
        sharp_lower |= exp.lo[pos] == lower;
        sharp_upper |= up[pos] == upper;
    }
    BernBound { lower, upper, sharp_lower, sharp_upper, k_used: exp.k.clone() }
}

/// Range enclosure of num/den from coefficientwise ratios; requires every
/// denominator coefficient to be strictly positive.
pub fn rational_enclosure<S: Scalar>(
    num: &BernsteinExpansion<S>,
    den: &BernsteinExpansion<S>,
) -> Result<BernBound<S>> {
    assert_eq!(num.k, den.k, "expansions must share a multi-degree");
    if den.lo.iter().any(|c| *c <= S::zero()) {
        return Err(Error::NonPositiveDenominatorCoefficient);
    }
    let mut lower: Option<S> = None;
    let mut upper: Option<S> = None;
    let mut ratios_lo = Vec::with_capacity(num.len());
    let mut ratios_hi = Vec::with_capacity(num.len());
    for pos in 0..num.len() {
        let r = num.coeff_at(pos).div(&den.coeff_at(pos))?;
        let (l, u) = (r.lo().clone(), r.hi().clone());
        if lower.as_ref().is_none_or(|x| l < *x) {
            lower = Some(l.clone());
        }
        if upper.as_ref().is_none_or(|x| u > *x) {
            upper = Some(u.clone());
        }
        ratios_lo.push(l);
        ratios_hi.push(u);
    }
    let (lower, upper) = (lower.unwrap(), upper.unwrap());
    let mut sharp_lower = false;
    let mut sharp_upper = false;
    for (pos, alpha) in MultiIndex::grid(&num.k).enumerate() {
        if alpha.is_corner_of(&num.k) && ratios_lo[pos] == ratios_hi[pos] {
            sharp_lower |= ratios_lo[pos] == lower;
            sharp_upper |= ratios_hi[pos] == upper;
        }
    }
    Ok(BernBound { lower, upper, sharp_lower, sharp_upper, k_used: num.k.clone() })
}
