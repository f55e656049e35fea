//! Elimination of the delta constraints `M (T - y) = 0`.
//!
//! A pivot set `P` with `M_P` invertible is solved for, leaving the free
//! coordinates `T_F` (one per row of `A`). On the support
//! `T_P = G T_F + offset` with `G = -M_P^{-1} M_F` and
//! `offset = y_P - G y_F`, and the delta functions contribute the constant
//! factor `1 / |det M_P|`.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GkzError, Result};
use crate::lattice::to_rational_rows;
use crate::model::GkzData;

/// How the pivot columns of `M` are chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Greedy scan in column order.
    #[default]
    FirstValid,
    /// Greedy scan in the given order, then the remaining columns in order.
    Prefer(Vec<usize>),
    /// Exactly these columns; rejected if `M_P` is singular.
    Exact(Vec<usize>),
}

/// Reduction of the constrained integral to the free coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedIntegral {
    n: usize,
    pivots: Vec<usize>,
    free: Vec<usize>,
    map: Vec<Vec<BigRational>>,
    jacobian: BigRational,
    lattice: Vec<Vec<BigRational>>,
    /// Column-major `N x m` embedding: `T = embed * s + offset`.
    embed: Vec<f64>,
    y: Vec<f64>,
    offset: Vec<f64>,
}

fn rank_of_columns(rows: &[Vec<BigRational>], cols: &[usize]) -> usize {
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
        .collect();
    rational_rank(&mut mat)
}

fn rational_rank(mat: &mut [Vec<BigRational>]) -> usize {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !mat[r][c].is_zero()) else {
            continue;
        };
        mat.swap(rank, p);
        let piv = mat[rank][c].clone();
        for r in rank + 1..rows {
            if mat[r][c].is_zero() {
                continue;
            }
            let f = &mat[r][c] / &piv;
            for k in c..cols {
                let t = &f * &mat[rank][k];
                mat[r][k] -= t;
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `a x = b` for square invertible `a` (columns of `b` independently).
fn solve_rational(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let k = b.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(ar, br)| ar.iter().chain(br.iter()).cloned().collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, p);
        let inv = aug[c][c].recip();
        for x in aug[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == c || aug[r][c].is_zero() {
                continue;
            }
            let f = aug[r][c].clone();
            for j in c..n + k {
                let t = &f * &aug[c][j];
                aug[r][j] -= t;
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn rational_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[c][c];
            for j in c..n {
                let t = &f * &m[c][j];
                m[r][j] -= t;
            }
        }
    }
    det
}

fn select_pivots(lattice: &[Vec<BigRational>], n: usize, rule: &PivotRule) -> Result<Vec<usize>> {
    let k = lattice.len();
    let order: Vec<usize> = match rule {
        PivotRule::FirstValid => (0..n).collect(),
        PivotRule::Prefer(pref) | PivotRule::Exact(pref) => {
            let mut seen = vec![false; n];
            for &c in pref {
                if c >= n {
                    return Err(GkzError::IndexOutOfRange { index: c, bound: n });
                }
                if seen[c] {
                    return Err(GkzError::Invalid(format!("pivot column {c} listed twice")));
                }
                seen[c] = true;
            }
            if let PivotRule::Exact(p) = rule {
                if p.len() != k {
                    return Err(GkzError::Invalid(format!(
                        "expected {k} pivot columns, got {}",
                        p.len()
                    )));
                }
                if rank_of_columns(lattice, p) != k {
                    return Err(GkzError::Invalid(format!(
                        "columns {p:?} give a singular M_P"
                    )));
                }
                let mut p = p.clone();
                p.sort_unstable();
                return Ok(p);
            }
            pref.iter()
                .copied()
                .chain((0..n).filter(|c| !seen[*c]))
                .collect()
        }
    };
    let mut chosen = Vec::with_capacity(k);
    for c in order {
        if chosen.len() == k {
            break;
        }
        chosen.push(c);
        if rank_of_columns(lattice, &chosen) != chosen.len() {
            chosen.pop();
        }
    }
    if chosen.len() != k {
        return Err(GkzError::Internal("lattice basis is rank deficient".into()));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// All pivot sets with `M_P` invertible, in lexicographic order.
pub fn valid_pivot_sets(data: &GkzData) -> Vec<Vec<usize>> {
    let lattice = to_rational_rows(data.lattice());
    let n = data.n();
    let k = data.lattice_rank();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        lattice: &[Vec<BigRational>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            if rank_of_columns(lattice, cur) == k {
                out.push(cur.clone());
            }
            return;
        }
        for c in start..n {
            if n - c < k - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, n, k, cur, lattice, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &lattice, &mut out);
    out
}

impl ReducedIntegral {
    /// Reduction with [`PivotRule::FirstValid`].
    pub fn new(data: &GkzData, y: &[f64]) -> Result<Self> {
        Self::with_rule(data, y, &PivotRule::FirstValid)
    }

    pub fn with_rule(data: &GkzData, y: &[f64], rule: &PivotRule) -> Result<Self> {
        let n = data.n();
        if y.len() != n {
            return Err(GkzError::Shape(format!(
                "argument vector has length {}, expected {n}",
                y.len()
            )));
        }
        let lattice = to_rational_rows(data.lattice());
        let pivots = select_pivots(&lattice, n, rule)?;
        let free: Vec<usize> = (0..n)
            .filter(|c| pivots.binary_search(c).is_err())
            .collect();
        let mp: Vec<Vec<BigRational>> = lattice
            .iter()
            .map(|r| pivots.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let neg_mf: Vec<Vec<BigRational>> = lattice
            .iter()
            .map(|r| free.iter().map(|&c| -r[c].clone()).collect())
            .collect();
        let map = if pivots.is_empty() {
            Vec::new()
        } else {
            solve_rational(&mp, &neg_mf).ok_or_else(|| GkzError::Internal("singular M_P".into()))?
        };
        let det = rational_det(&mp);
        let jacobian = det.abs().recip();
        let m = free.len();
        let mut embed = vec![0.0; n * m];
        for (j, &f) in free.iter().enumerate() {
            embed[j * n + f] = 1.0;
        }
        for (r, &p) in pivots.iter().enumerate() {
            for j in 0..m {
                embed[j * n + p] = map[r][j].to_f64().unwrap_or(f64::NAN);
            }
        }
        let mut out = ReducedIntegral {
            n,
            pivots,
            free,
            map,
            jacobian,
            lattice,
            embed,
            y: Vec::new(),
            offset: Vec::new(),
        };
        out.set_arguments(y);
        Ok(out)
    }

    fn set_arguments(&mut self, y: &[f64]) {
        let mut offset = vec![0.0; self.n];
        for (r, &p) in self.pivots.iter().enumerate() {
            let mut v = y[p];
            for (j, &f) in self.free.iter().enumerate() {
                v -= self.map[r][j].to_f64().unwrap_or(f64::NAN) * y[f];
            }
            offset[p] = v;
        }
        self.y = y.to_vec();
        self.offset = offset;
    }

    /// Same pivot set, new log-arguments.
    pub fn with_arguments(&self, y: &[f64]) -> Result<Self> {
        if y.len() != self.n {
            return Err(GkzError::Shape(format!(
                "argument vector has length {}, expected {}",
                y.len(),
                self.n
            )));
        }
        let mut out = self.clone();
        out.set_arguments(y);
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free coordinates `m`.
    pub fn free_dim(&self) -> usize {
        self.free.len()
    }

    pub fn pivot_set(&self) -> &[usize] {
        &self.pivots
    }

    pub fn free_set(&self) -> &[usize] {
        &self.free
    }

    /// Exact `G = -M_P^{-1} M_F`, rows indexed like [`Self::pivot_set`].
    pub fn affine_map(&self) -> &[Vec<BigRational>] {
        &self.map
    }

    /// Exact `1 / |det M_P|`.
    pub fn jacobian_factor(&self) -> &BigRational {
        &self.jacobian
    }

    pub fn jacobian_f64(&self) -> f64 {
        self.jacobian.to_f64().unwrap_or(f64::NAN)
    }

    pub fn log_arguments(&self) -> &[f64] {
        &self.y
    }

    /// Constant part of `T` on the support; zero on free coordinates.
    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Column-major `N x m` matrix `B` with `T = B s + offset`.
    pub fn embedding(&self) -> &[f64] {
        &self.embed
    }

    /// Full point `T` from free coordinates `s`.
    pub fn lift(&self, s: &[f64]) -> Vec<f64> {
        let mut t = self.offset.clone();
        for (j, sj) in s.iter().enumerate() {
            for (i, ti) in t.iter_mut().enumerate() {
                *ti += self.embed[j * self.n + i] * sj;
            }
        }
        t
    }

    /// Checks exactly that every point of the parametrisation satisfies
    /// `M T = M y`: i.e. `M_P G + M_F = 0`.
    pub fn verify(&self) -> bool {
        self.lattice.iter().all(|row| {
            (0..self.free.len()).all(|j| {
                let mut acc = row[self.free[j]].clone();
                for (r, &p) in self.pivots.iter().enumerate() {
                    acc += &row[p] * &self.map[r][j];
                }
                acc.is_zero()
            })
        })
    }

    /// Rows of `B` restricted to `rows`, as exact rationals.
    pub(crate) fn embedding_rows_exact(&self, rows: &[usize]) -> Vec<Vec<BigRational>> {
        let m = self.free.len();
        rows.iter()
            .map(|&i| {
                if let Ok(j) = self.free.binary_search(&i) {
                    (0..m)
                        .map(|k| {
                            if k == j {
                                BigRational::one()
                            } else {
                                BigRational::zero()
                            }
                        })
                        .collect()
                } else {
                    let r = self
                        .pivots
                        .binary_search(&i)
                        .expect("index is pivot or free");
                    self.map[r].clone()
                }
            })
            .collect()
    }

    /// Lattice basis as exact rationals.
    pub(crate) fn lattice_exact(&self) -> &[Vec<BigRational>] {
        &self.lattice
    }

    /// Rank of the exact embedding restricted to `rows`.
    pub(crate) fn embedding_rank(&self, rows: &[usize]) -> usize {
        let mut mat = self.embedding_rows_exact(rows);
        rational_rank(&mut mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix;
    use crate::model::build_gkz_data;
    use num_bigint::BigInt;

    fn big(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn data(a: &[Vec<i64>]) -> GkzData {
        build_gkz_data(IntegerMatrix::new(a).unwrap(), None).unwrap()
    }

    #[test]
    fn gamma_data_has_no_pivots() {
        let d = data(&[vec![1]]);
        let r = ReducedIntegral::new(&d, &[0.3]).unwrap();
        assert!(r.pivot_set().is_empty());
        assert_eq!(r.free_set(), &[0]);
        assert_eq!(r.jacobian_factor(), &big(1));
        assert!(r.verify());
    }

    #[test]
    fn two_variable_reduction() {
        // M = (1, -1): T_0 = T_1 + (y_0 - y_1).
        let d = data(&[vec![1, 1]]);
        let r = ReducedIntegral::new(&d, &[0.5, 0.2]).unwrap();
        assert_eq!(r.pivot_set(), &[0]);
        assert_eq!(r.affine_map(), &[vec![big(1)]]);
        assert!((r.offset()[0] - 0.3).abs() < 1e-15);
        assert!(r.verify());
    }

    #[test]
    fn jacobian_from_pivot_determinant() {
        // Kernel of (2, 3) is (3, -2); pivoting on column 0 gives 1/3.
        let d = data(&[vec![2, 3]]);
        let r = ReducedIntegral::with_rule(&d, &[0.0, 0.0], &PivotRule::Exact(vec![0])).unwrap();
        assert_eq!(r.jacobian_factor(), &BigRational::new(1.into(), 3.into()));
        let r = ReducedIntegral::with_rule(&d, &[0.0, 0.0], &PivotRule::Exact(vec![1])).unwrap();
        assert_eq!(r.jacobian_factor(), &BigRational::new(1.into(), 2.into()));
        assert!(r.verify());
    }

    #[test]
    fn exact_rule_rejects_singular_choice() {
        let d = data(&[vec![1, 0, 0], vec![0, 1, 1]]);
        // Kernel is (0, 1, -1): column 0 is identically zero.
        assert!(ReducedIntegral::with_rule(&d, &[0.0; 3], &PivotRule::Exact(vec![0])).is_err());
        assert_eq!(valid_pivot_sets(&d), vec![vec![1], vec![2]]);
    }

    #[test]
    fn lift_satisfies_constraints() {
        let d = data(&[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]);
        let y = [0.1, -0.4, 0.7, 0.2];
        let r = ReducedIntegral::new(&d, &y).unwrap();
        let t = r.lift(&[1.3, -0.8]);
        for row in d.lattice_rows() {
            let lhs: f64 = row.iter().zip(&t).map(|(a, b)| *a as f64 * b).sum();
            let rhs: f64 = row.iter().zip(&y).map(|(a, b)| *a as f64 * b).sum();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
