//! Exact convergence test for `int exp(Re alpha . T - sum e^{T_i})` over the
//! subspace `M (T - y) = 0`.
//!
//! The integral converges iff some real lattice shift `Re alpha + M^T xi` is
//! componentwise positive. Feasibility of
//! `alpha_i + (M^T xi)_i >= t` with `t > 0` is decided by Fourier–Motzkin
//! elimination of `xi` over the rationals.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Above this many inequalities the elimination gives up.
const CAP: usize = 20_000;

/// Inequality `c + coef . xi - t >= 0`, kept with unit `t` coefficient.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coef: Vec<BigRational>,
    c: BigRational,
}

/// `Some(true)` if a shift exists, `Some(false)` if none does, `None` if the
/// elimination grew past its cap.
pub(crate) fn gauge_positive(alpha_re: &[f64], lattice: &[Vec<BigRational>]) -> Option<bool> {
    let n = alpha_re.len();
    let k = lattice.len();
    let mut rows: Vec<Row> = Vec::with_capacity(n);
    for (i, a) in alpha_re.iter().enumerate() {
        let c = BigRational::from_float(*a)?;
        rows.push(Row {
            coef: (0..k).map(|al| lattice[al][i].clone()).collect(),
            c,
        });
    }
    for j in 0..k {
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            if r.coef[j].is_positive() {
                pos.push(r);
            } else if r.coef[j].is_negative() {
                neg.push(r);
            } else {
                next.push(r);
            }
        }
        for p in &pos {
            for q in &neg {
                // Weights chosen so that xi_j cancels; dividing by their
                // sum restores the unit t coefficient.
                let wp = -q.coef[j].clone();
                let wq = p.coef[j].clone();
                let total = &wp + &wq;
                let coef = p
                    .coef
                    .iter()
                    .zip(&q.coef)
                    .map(|(a, b)| (&wp * a + &wq * b) / &total)
                    .collect();
                let c = (&wp * &p.c + &wq * &q.c) / &total;
                next.push(Row { coef, c });
            }
        }
        next.sort();
        next.dedup();
        if next.len() > CAP {
            return None;
        }
        rows = next;
    }
    debug_assert!(rows.iter().all(|r| r.coef.iter().all(Zero::is_zero)));
    Some(rows.iter().all(|r| r.c.is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rows(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
        m.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn no_lattice_means_plain_positivity() {
        assert_eq!(gauge_positive(&[0.5], &[]), Some(true));
        assert_eq!(gauge_positive(&[0.0], &[]), Some(false));
    }

    #[test]
    fn bessel_lattice_allows_one_negative_entry() {
        // K_nu integrand: gamma = (0.3 + xi, -0.2 + xi) can be made positive.
        let m = rows(&[vec![1, 1]]);
        assert_eq!(gauge_positive(&[0.3, -0.2], &m), Some(true));
        assert_eq!(gauge_positive(&[-0.3, -0.2], &m), Some(true));
    }

    #[test]
    fn beta_lattice_needs_positive_sum() {
        // M = (1, -1): gamma_1 + gamma_2 is gauge invariant.
        let m = rows(&[vec![1, -1]]);
        assert_eq!(gauge_positive(&[0.3, -0.2], &m), Some(true));
        assert_eq!(gauge_positive(&[0.3, -0.3], &m), Some(false));
        assert_eq!(gauge_positive(&[-0.5, 0.2], &m), Some(false));
    }
}
