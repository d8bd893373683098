use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::constraints::{NormalizedConstraints, SparsityPattern};
use crate::algebra::{MultiIndex, Polynomial, Rational};
use crate::error::{Error, Result};
use crate::lp::{Column, Columns, LpProblem, Sense};
use crate::par;
use crate::report::LpDims;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// max { t : l' − t ∈ H_k }
    Lower,
    /// min { t : t − l' ∈ H_k }
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assembly {
    Sparse,
    Dense,
}

/// Every product h_{α,β} = Π_i g_i^{α_i} (1 − g_i)^{β_i} with |α| + |β| <= k,
/// keyed by the concatenated exponent (α, β) in graded-lex order.
///
/// Each product is obtained from one of degree one less by a single
/// multiplication; a degree level is computed in parallel.
pub fn krivine_products(g: &[Polynomial<Rational>], k: u32) -> Vec<(MultiIndex, Polynomial<Rational>)> {
    let q = g.len();
    let nv = g.first().map_or(0, Polynomial::nvars);
    let one = Polynomial::one(nv);
    let factors: Vec<Polynomial<Rational>> = g.iter().cloned().chain(g.iter().map(|gi| &one - gi)).collect();
    let keys = MultiIndex::all_up_to_degree(2 * q, k);
    let mut pos: HashMap<MultiIndex, usize> = HashMap::with_capacity(keys.len());
    let mut polys: Vec<Polynomial<Rational>> = Vec::with_capacity(keys.len());
    let mut start = 0;
    while start < keys.len() {
        let level = keys[start].total();
        let end = keys[start..].iter().position(|a| a.total() != level).map_or(keys.len(), |o| start + o);
        let chunk = &keys[start..end];
        let made: Vec<Polynomial<Rational>> = par::map(chunk, |a| {
            if a.is_zero() {
                return one.clone();
            }
            let i = a.as_slice().iter().position(|&e| e > 0).unwrap();
            let parent = a.with(i, a.get(i) - 1);
            &polys[pos[&parent]] * &factors[i]
        });
        for (a, p) in chunk.iter().zip(made) {
            pos.insert(a.clone(), polys.len());
            polys.push(p);
        }
        start = end;
    }
    keys.into_iter().zip(polys).collect()
}

struct MonomialIndex {
    map: HashMap<MultiIndex, usize>,
}

impl MonomialIndex {
    fn new(list: &[MultiIndex]) -> Self {
        MonomialIndex { map: list.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect() }
    }

    fn get(&self, a: &MultiIndex) -> Option<usize> {
        self.map.get(a).copied()
    }
}

fn to_column(p: &Polynomial<Rational>, rows: &MonomialIndex) -> Column {
    let mut col: Column = p.terms().map(|(a, c)| (rows.get(a).expect("monomial within row range"), c.clone())).collect();
    col.sort_by_key(|(r, _)| *r);
    col
}

/// Both directions of the relaxation over one shared column set.
#[derive(Clone, Debug)]
pub struct KsLp {
    pub mode: Assembly,
    pub order: u32,
    /// Largest total degree of any product h (the row degree).
    pub khat: u32,
    pub pattern: SparsityPattern,
    /// Exponents (α, β) of the products of one block (sparse) or of the
    /// whole problem (dense).
    pub labels: Arc<Vec<MultiIndex>>,
    /// Monomial of each row, over (y_1..y_n, e_1..e_m).
    pub row_monomials: Vec<MultiIndex>,
    pub lower: LpProblem,
    pub upper: LpProblem,
}

impl KsLp {
    pub fn get(&self, d: Direction) -> &LpProblem {
        match d {
            Direction::Lower => &self.lower,
            Direction::Upper => &self.upper,
        }
    }

    pub fn dims(&self) -> LpDims {
        self.lower.dims()
    }

    /// (block, (α, β)) of λ column `c`. Dense assemblies have one block.
    pub fn column_label(&self, c: usize) -> (usize, &MultiIndex) {
        let l = self.labels.len();
        (c / l, &self.labels[c % l])
    }

    /// Polynomial Σ_c λ_c h_c + a·t over (y, e), rebuilt from the rows.
    pub fn reconstruct(&self, d: Direction, t: &Rational, lambdas: &[(usize, Rational)]) -> Polynomial<Rational> {
        let lp = self.get(d);
        let rho = lp.residual(t, lambdas);
        // residual = b − (Aλ + a t), so Aλ + a t = b − residual
        let vals: Vec<Rational> = lp.rhs.iter().zip(&rho).map(|(b, r)| b - r).collect();
        let nv = self.pattern.n + self.pattern.m;
        Polynomial::from_terms(nv, self.row_monomials.iter().cloned().zip(vals))
    }
}

fn binomial_usize(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
}

/// Closed-form sizes of the sparse relaxation for box-constrained input
/// (columns include t).
pub fn sparse_dims_formula(n: usize, m: usize, p: usize, k: u32) -> LpDims {
    let k = k as usize;
    let cols = m * binomial_usize(2 * (p + 1) + k, k) + 1;
    let rows = if m == 0 {
        binomial_usize(n + k, k)
    } else {
        m * binomial_usize(n + 1 + k, k) - (m - 1) * binomial_usize(n + k, k)
    };
    LpDims { columns: cols, rows }
}

/// Closed-form sizes of the dense relaxation.
pub fn dense_dims_formula(n: usize, m: usize, p: usize, k: u32) -> LpDims {
    let k = k as usize;
    LpDims { columns: binomial_usize(2 * (p + m) + k, k) + 1, rows: binomial_usize(n + m + k, k) }
}

fn lift(p: &Polynomial<Rational>, nv: usize) -> Polynomial<Rational> {
    let targets: Vec<usize> = (0..p.nvars()).collect();
    p.embed(nv, &targets)
}

/// Build the LPs bounding l' = Σ_j s_j(y) e_j from below and above over
/// K × [-1, 1]^m, where the s_j are over the unit-box coordinates y and K is
/// described by `nc`.
pub fn assemble_lp(s: &[Polynomial<Rational>], nc: &NormalizedConstraints, k: u32, mode: Assembly) -> Result<KsLp> {
    let n = nc.nvars();
    let p = nc.p();
    let m = s.len();
    let deg_l = s.iter().filter(|sj| !sj.is_zero()).map(|sj| sj.total_degree() + 1).max().unwrap_or(0);
    if k < deg_l {
        return Err(Error::OrderTooLow { order: k, required: deg_l });
    }
    let pattern = SparsityPattern::new(n, m, p);
    let nv = n + m;
    let mut rhs_poly: Vec<(MultiIndex, Rational)> = Vec::new();
    for (j, sj) in s.iter().enumerate() {
        for (a, c) in sj.terms() {
            let mut v = a.as_slice().to_vec();
            v.extend(std::iter::repeat_n(0, m));
            v[n + j] = 1;
            rhs_poly.push((MultiIndex::from_vec(v), c.clone()));
        }
    }

    let (labels, columns, row_monomials, khat) = match mode {
        Assembly::Sparse => {
            let nl = n + 1;
            let mut g: Vec<Polynomial<Rational>> = nc.g.iter().map(|gi| lift(gi, nl)).collect();
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            g.push(Polynomial::from_terms(
                nl,
                [(MultiIndex::zero(nl), half.clone()), (MultiIndex::unit(nl, n), half)],
            ));
            let products = krivine_products(&g, k);
            let khat = products.iter().map(|(_, h)| h.total_degree()).max().unwrap_or(0).max(deg_l);
            let local_rows = MultiIndex::all_up_to_degree(nl, khat);
            let local_index = MonomialIndex::new(&local_rows);
            let shared = MultiIndex::all_up_to_degree(n, khat);
            let mut row_monomials: Vec<MultiIndex> = shared
                .iter()
                .map(|a| {
                    let mut v = a.as_slice().to_vec();
                    v.extend(std::iter::repeat_n(0, m));
                    MultiIndex::from_vec(v)
                })
                .collect();
            let shared_index = MonomialIndex::new(&shared);
            let mut row_maps = Vec::with_capacity(m);
            for j in 0..m {
                let map: Vec<usize> = local_rows
                    .iter()
                    .map(|a| {
                        let z = a.get(n);
                        let x: Vec<u32> = a.as_slice()[..n].to_vec();
                        if z == 0 {
                            shared_index.get(&MultiIndex::from_vec(x)).unwrap()
                        } else {
                            let mut v = x;
                            v.extend(std::iter::repeat_n(0, m));
                            v[n + j] = z;
                            row_monomials.push(MultiIndex::from_vec(v));
                            row_monomials.len() - 1
                        }
                    })
                    .collect();
                row_maps.push(map);
            }
            let local_cols: Vec<Column> = par::map(&products, |(_, h)| to_column(h, &local_index));
            let labels: Vec<MultiIndex> = products.into_iter().map(|(a, _)| a).collect();
            let cols = Columns::Blocked { local: Arc::new(local_cols), row_maps: Arc::new(row_maps) };
            (labels, cols, row_monomials, khat)
        }
        Assembly::Dense => {
            let mut g: Vec<Polynomial<Rational>> = nc.g.iter().map(|gi| lift(gi, nv)).collect();
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            for j in 0..m {
                g.push(Polynomial::from_terms(
                    nv,
                    [(MultiIndex::zero(nv), half.clone()), (MultiIndex::unit(nv, n + j), half.clone())],
                ));
            }
            let products = krivine_products(&g, k);
            let khat = products.iter().map(|(_, h)| h.total_degree()).max().unwrap_or(0).max(deg_l);
            let rows = MultiIndex::all_up_to_degree(nv, khat);
            let index = MonomialIndex::new(&rows);
            let cols: Vec<Column> = par::map(&products, |(_, h)| to_column(h, &index));
            let labels: Vec<MultiIndex> = products.into_iter().map(|(a, _)| a).collect();
            (labels, Columns::Explicit(cols), rows, khat)
        }
    };

    let nrows = row_monomials.len();
    let row_index = MonomialIndex::new(&row_monomials);
    let mut rhs = vec![Rational::zero(); nrows];
    for (a, c) in rhs_poly {
        let r = row_index.get(&a).ok_or(Error::OrderTooLow { order: k, required: deg_l })?;
        rhs[r] += c;
    }
    debug_assert!(row_monomials[0].is_zero());
    let lower = LpProblem { sense: Sense::Maximize, nrows, t_col: vec![(0, Rational::one())], columns, rhs };
    let upper = lower.with_columns_of(
        Sense::Minimize,
        vec![(0, -Rational::one())],
        lower.rhs.iter().map(|v| -v).collect(),
    );
    Ok(KsLp { mode, order: k, khat, pattern, labels: Arc::new(labels), row_monomials, lower, upper })
}
