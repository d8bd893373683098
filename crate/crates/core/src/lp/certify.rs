use num_traits::{Signed, Zero};

use super::problem::{LpProblem, Sense};
use crate::algebra::Rational;

/// A certified LP bound.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifiedBound {
    /// The bound after repair (equal to the solver's t when the residual
    /// vanishes).
    pub t: Rational,
    /// Σ_γ |ρ_γ| of the exact residual.
    pub residual_l1: Rational,
    /// Number of negative λ entries that were clamped to zero.
    pub clamped: usize,
}

impl VerifiedBound {
    pub fn is_exact(&self) -> bool {
        self.residual_l1.is_zero()
    }
}

/// Recompute the residual ρ = b − Aλ − a t of a certificate in exact
/// arithmetic and weaken t by Σ|ρ_γ| (down for a maximisation, up for a
/// minimisation).
///
/// The repair is sound for LPs whose rows are monomial coefficients of
/// polynomials over a domain on which every monomial has magnitude at most
/// one, which is how the Krivine-Stengle assembly sets things up: there
/// `ρ(y)` is the polynomial gap in the representation, and `|ρ(y)| <= Σ|ρ_γ|`.
pub fn verify_certificate(lp: &LpProblem, t: &Rational, lambdas: &[(usize, Rational)]) -> VerifiedBound {
    let mut clamped = 0;
    let lam: Vec<(usize, Rational)> = lambdas
        .iter()
        .filter_map(|(c, v)| {
            if v.is_negative() {
                clamped += 1;
                None
            } else {
                Some((*c, v.clone()))
            }
        })
        .collect();
    let rho = lp.residual(t, &lam);
    let l1: Rational = rho.iter().map(Signed::abs).sum();
    let t = match lp.sense {
        Sense::Maximize => t - &l1,
        Sense::Minimize => t + &l1,
    };
    VerifiedBound { t, residual_l1: l1, clamped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{pow2, rat_int};
    use crate::lp::{solve_exact, Limits};

    fn lp() -> LpProblem {
        // max t s.t. t + λ0 + λ1 = 1, λ2 − λ1 = 0
        LpProblem::new(
            Sense::Maximize,
            2,
            vec![(0, rat_int(1))],
            vec![vec![(0, rat_int(1))], vec![(0, rat_int(1)), (1, rat_int(-1))], vec![(1, rat_int(1))]],
            vec![rat_int(1), rat_int(0)],
        )
    }

    #[test]
    fn exact_certificate_is_unchanged() {
        let lp = lp();
        let r = solve_exact(&lp, &Limits::default());
        let v = verify_certificate(&lp, r.t.as_ref().unwrap(), &r.lambdas);
        assert!(v.is_exact());
        assert_eq!(v.t, rat_int(1));
    }

    #[test]
    fn perturbed_certificate_is_repaired() {
        let lp = lp();
        let delta = pow2(-40);
        let v = verify_certificate(&lp, &(rat_int(1) + &delta), &[]);
        assert_eq!(v.residual_l1, delta);
        assert_eq!(v.t, rat_int(1));
    }

    #[test]
    fn negative_lambda_is_clamped() {
        let lp = lp();
        let tiny = pow2(-50);
        let v = verify_certificate(&lp, &rat_int(1), &[(0, -tiny.clone())]);
        assert_eq!(v.clamped, 1);
        assert!(v.t <= rat_int(1));
    }
}
