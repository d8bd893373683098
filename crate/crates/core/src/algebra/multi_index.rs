use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Exponent vector; one entry per variable of the ambient ring.
///
/// Ordering is graded lexicographic: lower total degree first, ties broken
/// lexicographically on the entries with the first variable most
/// significant. Polynomials iterate their terms in this order, which fixes
/// the row order of every assembled LP.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Box<[u32]>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n].into_boxed_slice())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v.into_boxed_slice())
    }

    pub fn uniform(n: usize, k: u32) -> Self {
        MultiIndex(vec![k; n].into_boxed_slice())
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        MultiIndex(v.into_boxed_slice())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Componentwise `self <= other`; `None` when the lengths differ.
    pub fn le(&self, other: &Self) -> Option<bool> {
        (self.len() == other.len()).then(|| self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn join(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn with(&self, i: usize, v: u32) -> Self {
        let mut out = self.0.clone();
        out[i] = v;
        MultiIndex(out)
    }

    /// True when every entry is either 0 or the corresponding entry of `k`,
    /// i.e. the index is a vertex of the grid `[0,k1] x ... x [0,kn]`.
    pub fn is_corner_of(&self, k: &Self) -> bool {
        self.0.iter().zip(k.0.iter()).all(|(a, kk)| *a == 0 || a == kk)
    }

    /// All indices `alpha <= k` in row-major order (last variable fastest).
    pub fn grid(k: &Self) -> GridIter {
        GridIter { k: k.0.to_vec(), cur: Some(vec![0; k.len()]) }
    }

    /// Number of grid points `prod (k_i + 1)`.
    pub fn grid_len(k: &Self) -> usize {
        k.0.iter().map(|&a| a as usize + 1).product()
    }

    /// Row-major position of `self` inside the grid of `k`.
    pub fn grid_position(&self, k: &Self) -> usize {
        let mut pos = 0usize;
        for (a, kk) in self.0.iter().zip(k.0.iter()) {
            pos = pos * (*kk as usize + 1) + *a as usize;
        }
        pos
    }

    /// Every exponent vector over `n` variables with total degree <= `d`,
    /// in graded-lex order.
    pub fn all_up_to_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for total in 0..=d {
            let mut cur = vec![0u32; n];
            compositions(&mut cur, 0, total, &mut out);
        }
        out
    }
}

fn compositions(cur: &mut Vec<u32>, pos: usize, rest: u32, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if rest == 0 {
            out.push(MultiIndex::zero(0));
        }
        return;
    }
    if pos == n - 1 {
        cur[pos] = rest;
        out.push(MultiIndex(cur.clone().into_boxed_slice()));
        cur[pos] = 0;
        return;
    }
    for v in (0..=rest).rev() {
        cur[pos] = v;
        compositions(cur, pos + 1, rest - v, out);
    }
    cur[pos] = 0;
}

pub struct GridIter {
    k: Vec<u32>,
    cur: Option<Vec<u32>>,
}

impl Iterator for GridIter {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.cur.as_mut()?;
        let out = MultiIndex(cur.clone().into_boxed_slice());
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if cur[i] < self.k[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| other.0.cmp(&self.0))
            .then_with(|| self.len().cmp(&other.len()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}
