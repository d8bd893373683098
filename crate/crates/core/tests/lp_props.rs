use fpcert::algebra::{from_f64_exact, rat_int, Rational};
use fpcert::lp::{parse_lp, solve_exact, solve_float, verify_certificate, write_lp, Limits, LpProblem, Sense, Status};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

/// `opt t` with t in row 0, `rows` random equality rows, and a final row
/// `Σ w_c λ_c = bound` with every w_c >= 1 so the feasible set is bounded.
#[derive(Clone, Debug)]
struct Case {
    sense: Sense,
    a: Vec<Vec<i64>>,
    b: Vec<i64>,
}

impl Case {
    fn lp(&self) -> LpProblem {
        let ncols = self.a[0].len();
        let columns = (0..ncols)
            .map(|c| {
                (0..self.a.len()).filter(|&r| self.a[r][c] != 0).map(|r| (r, rat_int(self.a[r][c]))).collect()
            })
            .collect();
        LpProblem::new(self.sense, self.a.len(), vec![(0, rat_int(1))], columns, self.b.iter().map(|&v| rat_int(v)).collect())
    }
}

fn case() -> impl Strategy<Value = Case> {
    (2usize..=6, 0usize..=2, prop::bool::ANY).prop_flat_map(|(ncols, rows, max)| {
        let row = || prop::collection::vec(-3i64..=3, ncols);
        (
            row(),
            prop::collection::vec(row(), rows),
            prop::collection::vec(1i64..=3, ncols),
            prop::collection::vec(-4i64..=4, rows + 1),
            0i64..=6,
        )
            .prop_map(move |(obj, mid, w, b, bound)| {
                let mut a = vec![obj];
                a.extend(mid);
                a.push(w);
                let mut rhs = b;
                rhs.push(bound);
                Case { sense: if max { Sense::Maximize } else { Sense::Minimize }, a, b: rhs }
            })
    })
}

/// Solve a square system; None if singular.
fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let v = &f * &m[col][c];
                    m[r][c] -= v;
                }
                let v = &f * &rhs[col];
                rhs[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let (rows, cols) = (m.len(), m[0].len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            let f = &m[i][c] / &m[r][c];
            for j in c..cols {
                let v = &f * &m[r][j];
                m[i][j] -= v;
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Optimum by enumerating basic feasible solutions of the λ-system (rows
/// 1..), with t = b_0 − Σ A_0c λ_c. None means infeasible; rank-deficient
/// systems are reported as `Err` and skipped.
fn brute_force(c: &Case) -> Result<Option<Rational>, ()> {
    let q = |v: i64| rat_int(v);
    let sys: Vec<Vec<Rational>> = c.a[1..].iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
    let rhs: Vec<Rational> = c.b[1..].iter().map(|&v| q(v)).collect();
    let ncols = c.a[0].len();
    if rank(sys.clone()) < sys.len() {
        return Err(());
    }
    let mut best: Option<Rational> = None;
    for basis in subsets(ncols, sys.len()) {
        let m: Vec<Vec<Rational>> = sys.iter().map(|row| basis.iter().map(|&j| row[j].clone()).collect()).collect();
        let Some(x) = solve_square(m, rhs.clone()) else { continue };
        if x.iter().any(|v| *v < Rational::zero()) {
            continue;
        }
        let mut t = q(c.b[0]);
        for (j, v) in basis.iter().zip(&x) {
            t -= q(c.a[0][*j]) * v;
        }
        let better = match (&best, c.sense) {
            (None, _) => true,
            (Some(b), Sense::Maximize) => t > *b,
            (Some(b), Sense::Minimize) => t < *b,
        };
        if better {
            best = Some(t);
        }
    }
    Ok(best)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_simplex_matches_vertex_enumeration(c in case()) {
        let Ok(expected) = brute_force(&c) else { return Ok(()) };
        let lp = c.lp();
        let res = solve_exact(&lp, &Limits::default());
        match expected {
            None => prop_assert_eq!(res.status, Status::Infeasible),
            Some(t) => {
                prop_assert_eq!(res.status, Status::Optimal);
                let got = res.t.clone().unwrap();
                prop_assert_eq!(&got, &t);
                let v = verify_certificate(&lp, &got, &res.lambdas);
                prop_assert!(v.is_exact());
                prop_assert_eq!(v.t, t);
            }
        }
    }

    #[test]
    fn float_solver_agrees(c in case()) {
        let Ok(Some(expected)) = brute_force(&c) else { return Ok(()) };
        let lp = c.lp();
        let res = solve_float(&lp, &Limits::default()).unwrap();
        prop_assert_eq!(res.status, Status::Optimal);
        let got = res.t.clone().unwrap();
        let diff = (&got - &expected).to_f64().unwrap().abs();
        prop_assert!(diff <= 1e-7 * (1.0 + expected.to_f64().unwrap().abs()), "{} vs {}", got, expected);
    }

    #[test]
    fn lp_files_round_trip(c in case()) {
        let lp = c.lp();
        let back = parse_lp(&write_lp(&lp)).unwrap();
        prop_assert_eq!(back.sense, lp.sense);
        prop_assert_eq!(back.nrows, lp.nrows);
        prop_assert_eq!(&back.rhs, &lp.rhs);
        prop_assert_eq!(back.num_lambdas(), lp.num_lambdas());
        for col in 0..lp.num_lambdas() {
            prop_assert_eq!(back.column(col), lp.column(col));
        }
    }
}

#[test]
fn float_values_are_exact_rationals_of_doubles() {
    let c = Case { sense: Sense::Maximize, a: vec![vec![1, 1], vec![1, 3]], b: vec![1, 1] };
    let res = solve_float(&c.lp(), &Limits::default()).unwrap();
    let t = res.t.unwrap();
    assert_eq!(from_f64_exact(t.to_f64().unwrap()).unwrap(), t);
}
