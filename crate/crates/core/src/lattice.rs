//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Everything here works on [`IntegerMatrix`], a dense row-major matrix of
//! [`BigInt`] entries. The reductions (Hermite, Smith, fraction-free
//! elimination) never leave the integers, so results are exact regardless of
//! how large intermediate entries grow.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GkzError, Result};

/// Dense integer matrix with exact entries.
///
/// The column count is always positive. A matrix with zero rows is allowed
/// and represents, for example, the defining matrix of a problem with `m = 0`
/// or the kernel basis of a lattice that is `{0}`.
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
    rank: OnceLock<usize>,
}

impl Clone for IntegerMatrix {
    fn clone(&self) -> Self {
        let rank = OnceLock::new();
        if let Some(r) = self.rank.get() {
            let _ = rank.set(*r);
        }
        IntegerMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            rank,
        }
    }
}

impl PartialEq for IntegerMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for IntegerMatrix {}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntegerMatrix {
    fn from_parts(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        IntegerMatrix {
            rows,
            cols,
            data,
            rank: OnceLock::new(),
        }
    }

    /// Builds a matrix from rows of machine integers. Rows must be non-empty
    /// and of equal length; at least one row is required.
    pub fn new<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(GkzError::Shape(
                "matrix must have at least one row; use IntegerMatrix::zero_rows".into(),
            ));
        }
        let big: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x.into()).collect())
            .collect();
        Self::from_big_rows(big)
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        if cols == 0 {
            return Err(GkzError::Shape(
                "matrix must have a positive number of columns".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(GkzError::Shape("ragged rows".into()));
        }
        let n = rows.len();
        Ok(Self::from_parts(
            n,
            cols,
            rows.into_iter().flatten().collect(),
        ))
    }

    /// Rows given with an explicit column count; `rows` may be empty.
    pub fn with_cols(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if rows.is_empty() {
            return Self::zero_rows(cols);
        }
        let m = Self::from_big_rows(rows)?;
        if m.cols != cols {
            return Err(GkzError::Shape(format!(
                "expected {} columns, found {}",
                cols, m.cols
            )));
        }
        Ok(m)
    }

    /// The `0 x cols` matrix.
    pub fn zero_rows(cols: usize) -> Result<Self> {
        if cols == 0 {
            return Err(GkzError::Shape(
                "matrix must have a positive number of columns".into(),
            ));
        }
        Ok(Self::from_parts(0, cols, Vec::new()))
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigInt::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigInt::one();
        }
        Self::from_parts(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_i64())
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        // A transposed zero-row matrix would have zero columns; callers never need it.
        Self::from_parts(self.cols, self.rows, data)
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != other.rows {
            return Err(GkzError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Self::from_parts(self.rows, other.cols, data))
    }

    /// Product `self * v` for an integer vector.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(GkzError::Shape(format!(
                "vector length {} vs {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Rank over the rationals, computed once and cached.
    pub fn rank(&self) -> usize {
        *self
            .rank
            .get_or_init(|| fraction_free_rank(self.rows, self.cols, self.data.clone()))
    }

    /// Exact determinant of a square matrix (Bareiss elimination).
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(GkzError::Shape(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(bareiss_determinant(self.rows, self.data.clone()))
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols
            && self
                .determinant()
                .map(|d| d.abs().is_one())
                .unwrap_or(false)
    }

    /// Row-style Hermite normal form: `H = U * self` with `U` unimodular,
    /// `H` in echelon form with positive pivots and entries above each pivot
    /// reduced into `[0, pivot)`. Zero rows are kept at the bottom.
    pub fn hermite_with_transform(&self) -> (IntegerMatrix, IntegerMatrix, usize) {
        let mut h: Vec<Vec<BigInt>> = self.row_vecs();
        let mut u: Vec<Vec<BigInt>> = IntegerMatrix::identity(self.rows).row_vecs();
        let rank = hermite_in_place(&mut h, &mut u, self.cols);
        let hm = Self::from_parts(self.rows, self.cols, h.into_iter().flatten().collect());
        let um = Self::from_parts(self.rows, self.rows, u.into_iter().flatten().collect());
        (hm, um, rank)
    }

    /// Hermite normal form with zero rows removed. Two matrices with the same
    /// column count span the same row lattice iff these agree.
    pub fn hermite_basis(&self) -> IntegerMatrix {
        let mut h: Vec<Vec<BigInt>> = self.row_vecs();
        let mut u: Vec<Vec<BigInt>> = Vec::new();
        let rank = hermite_in_place(&mut h, &mut u, self.cols);
        h.truncate(rank);
        IntegerMatrix::with_cols(self.cols, h).expect("hermite rows keep column count")
    }

    pub fn same_row_lattice(&self, other: &IntegerMatrix) -> bool {
        self.cols == other.cols && self.hermite_basis() == other.hermite_basis()
    }

    /// Whether `v` is an integer combination of the rows.
    pub fn row_lattice_contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.cols {
            return false;
        }
        let h = self.hermite_basis();
        let mut rest = v.to_vec();
        let mut col = 0;
        for i in 0..h.rows() {
            let row = h.row(i);
            while col < self.cols && row[col].is_zero() {
                if !rest[col].is_zero() {
                    return false;
                }
                col += 1;
            }
            let (q, r) = rest[col].div_rem(&row[col]);
            if !r.is_zero() {
                return false;
            }
            for (x, y) in rest.iter_mut().zip(row) {
                *x -= &q * y;
            }
            col += 1;
        }
        rest.iter().all(Zero::is_zero)
    }

    /// Invariant factors `d_1 | d_2 | ... | d_r` of the Smith normal form
    /// (positive, one per unit of rank).
    pub fn smith_invariants(&self) -> Vec<BigInt> {
        let mut d = self.row_vecs();
        smith_diagonal(&mut d, self.rows, self.cols)
    }
}

/// Elementary-divisor check: true iff the columns of `a` generate `Z^m`,
/// `m = a.rows()`. The empty-row matrix trivially generates `Z^0`.
pub fn is_generating(a: &IntegerMatrix) -> bool {
    if a.rows() == 0 {
        return true;
    }
    let inv = a.smith_invariants();
    inv.len() == a.rows() && inv.iter().all(One::is_one)
}

/// `true` iff `a * m^T = 0` exactly.
pub fn check_orthogonality(a: &IntegerMatrix, m: &IntegerMatrix) -> Result<bool> {
    if a.cols() != m.cols() {
        return Err(GkzError::Shape(format!(
            "A has {} columns but lattice basis has {}",
            a.cols(),
            m.cols()
        )));
    }
    for i in 0..a.rows() {
        for j in 0..m.rows() {
            let dot: BigInt = a.row(i).iter().zip(m.row(j)).map(|(x, y)| x * y).sum();
            if !dot.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A primitive basis of `{ l in Z^N : A l = 0 }`, returned as the rows of a
/// `(N - m) x N` matrix in Hermite normal form.
pub fn integer_kernel_basis(a: &IntegerMatrix) -> Result<IntegerMatrix> {
    let n = a.cols();
    let m = a.rows();
    if m > n {
        return Err(GkzError::RankMismatch {
            expected: n,
            found: m,
        });
    }
    let rank = a.rank();
    if rank != m {
        return Err(GkzError::RankMismatch {
            expected: m,
            found: rank,
        });
    }
    if m == 0 {
        return Ok(IntegerMatrix::identity(n));
    }
    // U * A^T = H; the rows of U facing zero rows of H span the kernel over Z.
    let (_, u, r) = a.transpose().hermite_with_transform();
    debug_assert_eq!(r, m);
    let kernel_rows: Vec<Vec<BigInt>> = (r..n).map(|i| u.row(i).to_vec()).collect();
    let basis = IntegerMatrix::with_cols(n, kernel_rows)?;
    if basis.is_empty() {
        return Ok(basis);
    }
    Ok(basis.hermite_basis())
}

/// Deterministic unimodular `n x n` matrix built from at most `3n` seeded
/// elementary row operations with coefficients in `[-2, 2]`.
pub fn random_unimodular(n: usize, seed: i64) -> Result<IntegerMatrix> {
    if n == 0 {
        return Err(GkzError::Invalid("random_unimodular needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let mut g: Vec<Vec<BigInt>> = IntegerMatrix::identity(n).row_vecs();
    let ops = rng.gen_range(1..=3 * n);
    for _ in 0..ops {
        let kind = if n == 1 { 2 } else { rng.gen_range(0..3u8) };
        match kind {
            0 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let c: i64 = [-2, -1, 1, 2][rng.gen_range(0..4)];
                let src = g[j].clone();
                for (x, y) in g[i].iter_mut().zip(&src) {
                    *x += y * c;
                }
            }
            1 => {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                g.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..n);
                for x in g[i].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }
    IntegerMatrix::from_big_rows(g)
}

fn fraction_free_rank(rows: usize, cols: usize, mut a: Vec<BigInt>) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let piv = a[rank * cols + c].clone();
        for r in rank + 1..rows {
            let f = a[r * cols + c].clone();
            for j in c..cols {
                let v = (&piv * &a[r * cols + j] - &f * &a[rank * cols + j]) / &prev;
                a[r * cols + j] = v;
            }
        }
        prev = piv;
        rank += 1;
    }
    rank
}

fn bareiss_determinant(n: usize, mut a: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(p * n + j, k * n + j);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k * n + k] * &a[i * n + j] - &a[i * n + k] * &a[k * n + j]) / &prev;
                a[i * n + j] = v;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

fn sub_row_multiple(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        *x -= q * y;
    }
}

/// Euclidean row reduction to Hermite form; `u` (possibly empty) receives the
/// same row operations. Returns the rank.
fn hermite_in_place(h: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = h.len();
    let track = !u.is_empty();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let best = (r..rows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&i, &j| h[i][c].abs().cmp(&h[j][c].abs()));
            let Some(best) = best else { break };
            h.swap(r, best);
            if track {
                u.swap(r, best);
            }
            let mut done = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                sub_row_multiple(h, i, r, &q);
                if track {
                    sub_row_multiple(u, i, r, &q);
                }
                if !h[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -x.clone();
            }
            if track {
                for x in u[r].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            sub_row_multiple(h, i, r, &q);
            if track {
                sub_row_multiple(u, i, r, &q);
            }
        }
        r += 1;
    }
    r
}

fn smith_diagonal(d: &mut [Vec<BigInt>], rows: usize, cols: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && best
                        .map(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                        .unwrap_or(true)
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap(t, bi);
        for row in d.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                sub_row_multiple(d, i, t, &q);
                if !d[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for row in d.iter_mut() {
                    let v = &q * &row[t];
                    row[j] -= v;
                }
                if !d[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Move the smallest remaining entry of row/column t to the pivot.
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..rows {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[bi][bj].abs() {
                        bi = i;
                        bj = t;
                    }
                }
                for j in t + 1..cols {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[bi][bj].abs() {
                        bi = t;
                        bj = j;
                    }
                }
                d.swap(t, bi);
                for row in d.iter_mut() {
                    row.swap(t, bj);
                }
                continue;
            }
            // Divisibility: pull in a row whose entries the pivot does not divide.
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[i][j] % &d[t][t]).is_zero()));
            match offender {
                Some(i) => {
                    let src = d[i].clone();
                    for (x, y) in d[t].iter_mut().zip(&src) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        out.push(d[t][t].abs());
        t += 1;
    }
    out
}

/// Exact rational matrix used by the delta elimination.
pub(crate) fn to_rational_rows(m: &IntegerMatrix) -> Vec<Vec<BigRational>> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::new(rows).unwrap()
    }

    #[test]
    fn kernel_of_single_row() {
        let m = integer_kernel_basis(&mat(&[vec![1, 1]])).unwrap();
        assert_eq!(m, mat(&[vec![1, -1]]));
    }

    #[test]
    fn kernel_of_difference_matrix_is_all_ones() {
        let m = integer_kernel_basis(&mat(&[vec![1, -1, 0], vec![0, 1, -1]])).unwrap();
        assert_eq!(m, mat(&[vec![1, 1, 1]]));
        let m = integer_kernel_basis(&mat(&[vec![1, -1]])).unwrap();
        assert_eq!(m, mat(&[vec![1, 1]]));
    }

    #[test]
    fn kernel_square_full_rank_is_empty() {
        let m = integer_kernel_basis(&mat(&[vec![1]])).unwrap();
        assert_eq!(m.rows(), 0);
        assert_eq!(m.cols(), 1);
        let m = integer_kernel_basis(&mat(&[vec![2, 1], vec![1, 1]])).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn kernel_rejects_rank_deficient() {
        let err = integer_kernel_basis(&mat(&[vec![1, 2], vec![2, 4]])).unwrap_err();
        assert_eq!(
            err,
            GkzError::RankMismatch {
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn kernel_is_primitive_when_a_has_large_entries() {
        // Kernel lattice of [2, 3] is spanned by (3, -2), not a multiple of it.
        let m = integer_kernel_basis(&mat(&[vec![2, 3]])).unwrap();
        assert_eq!(m, mat(&[vec![3, -2]]));
    }

    #[test]
    fn orthogonality_examples() {
        assert!(check_orthogonality(&mat(&[vec![1, 1]]), &mat(&[vec![1, -1]])).unwrap());
        assert!(!check_orthogonality(&mat(&[vec![1, 0]]), &mat(&[vec![1, 1]])).unwrap());
        assert!(check_orthogonality(&mat(&[vec![1, 0, 0]]), &mat(&[vec![1, 1]])).is_err());
    }

    #[test]
    fn generation_examples() {
        assert!(!is_generating(&mat(&[vec![2]])));
        assert!(is_generating(&mat(&[vec![1, 1]])));
        assert!(is_generating(&mat(&[vec![1, -1, 0], vec![0, 1, -1]])));
        assert!(is_generating(&mat(&[vec![2, 3]])));
        assert!(!is_generating(&mat(&[vec![2, 0], vec![0, 2]])));
        assert!(is_generating(&IntegerMatrix::zero_rows(3).unwrap()));
    }

    #[test]
    fn smith_invariants_of_known_matrix() {
        let inv = mat(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).smith_invariants();
        let expect: Vec<BigInt> = vec![2.into(), 6.into(), 12.into()];
        assert_eq!(inv, expect);
    }

    #[test]
    fn determinant_and_rank() {
        let a = mat(&[vec![2, 1], vec![1, 1]]);
        assert_eq!(a.determinant().unwrap(), BigInt::one());
        assert_eq!(a.rank(), 2);
        let b = mat(&[vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(b.rank(), 1);
        let c = mat(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert_eq!(c.determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn unimodular_small_cases() {
        for seed in 0..20 {
            let g = random_unimodular(1, seed).unwrap();
            assert!(g == mat(&[vec![1]]) || g == mat(&[vec![-1]]));
        }
        let g = random_unimodular(2, 0).unwrap();
        assert!(g.determinant().unwrap().abs().is_one());
        assert_eq!(g, random_unimodular(2, 0).unwrap());
        let h = random_unimodular(2, 1).unwrap();
        assert!(g.mul(&h).unwrap().is_unimodular());
    }

    #[test]
    fn row_lattice_membership() {
        let b = mat(&[vec![2, -2]]);
        assert!(!b.row_lattice_contains(&[1.into(), (-1).into()]));
        assert!(b.row_lattice_contains(&[4.into(), (-4).into()]));
        assert!(mat(&[vec![1, -1]]).same_row_lattice(&mat(&[vec![-1, 1]])));
    }
}
