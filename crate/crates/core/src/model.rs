//! Validated problem data: the defining matrix `A`, a primitive basis `M` of
//! its relation lattice, spectral vectors `gamma` and positive arguments `u`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::error::{GkzError, Result};
use crate::lattice::{check_orthogonality, integer_kernel_basis, is_generating, IntegerMatrix};

/// Defining matrix `A` (`m x N`) and lattice basis `M` (`(N - m) x N`).
///
/// Invariants, checked on construction: `A M^T = 0`, `rank A = m`,
/// `rank M = N - m`, the columns of `A` generate `Z^m`, and the rows of `M`
/// span the whole relation lattice `{ l : A l = 0 }`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkzData {
    a: IntegerMatrix,
    lattice: IntegerMatrix,
}

impl GkzData {
    /// Builds and validates the data. Without an explicit `lattice` the
    /// canonical (Hermite) kernel basis of `a` is used.
    pub fn new(a: IntegerMatrix, lattice: Option<IntegerMatrix>) -> Result<Self> {
        let n = a.cols();
        let m = a.rows();
        if a.rank() != m {
            return Err(GkzError::RankMismatch {
                expected: m,
                found: a.rank(),
            });
        }
        if !is_generating(&a) {
            return Err(GkzError::NotGenerating(m));
        }
        let canonical = integer_kernel_basis(&a)?;
        let lattice = match lattice {
            None => canonical,
            Some(l) => {
                if l.cols() != n {
                    return Err(GkzError::Shape(format!(
                        "lattice basis has {} columns, A has {}",
                        l.cols(),
                        n
                    )));
                }
                if l.rows() != n - m {
                    return Err(GkzError::NotPrimitiveLattice(format!(
                        "expected {} basis vectors, found {}",
                        n - m,
                        l.rows()
                    )));
                }
                if !check_orthogonality(&a, &l)? {
                    return Err(GkzError::NotPrimitiveLattice("A * M^T != 0".into()));
                }
                if l.rank() != n - m {
                    return Err(GkzError::NotPrimitiveLattice(format!(
                        "rank {} instead of {}",
                        l.rank(),
                        n - m
                    )));
                }
                if !l.is_empty() && !l.same_row_lattice(&canonical) {
                    return Err(GkzError::NotPrimitiveLattice(
                        "rows span a proper sublattice of the relation lattice".into(),
                    ));
                }
                l
            }
        };
        Ok(GkzData { a, lattice })
    }

    /// Data with no torus equations: `m = 0`, relation lattice `Z^N` spanned
    /// by `lattice`.
    pub fn without_torus(lattice: IntegerMatrix) -> Result<Self> {
        let a = IntegerMatrix::zero_rows(lattice.cols())?;
        Self::new(a, Some(lattice))
    }

    pub fn a(&self) -> &IntegerMatrix {
        &self.a
    }

    pub fn lattice(&self) -> &IntegerMatrix {
        &self.lattice
    }

    /// Number of variables `N`.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Number of torus equations `m` (rows of `A`).
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Rank of the relation lattice, `N - m`.
    pub fn lattice_rank(&self) -> usize {
        self.n() - self.m()
    }

    pub fn in_lattice(&self, l: &[i64]) -> bool {
        if l.len() != self.n() {
            return false;
        }
        let v: Vec<BigInt> = l.iter().map(|&x| BigInt::from(x)).collect();
        self.a
            .apply(&v)
            .map(|r| r.iter().all(Zero::is_zero))
            .unwrap_or(false)
    }

    /// Lattice generators as machine integers.
    pub fn lattice_rows(&self) -> Vec<Vec<i64>> {
        self.lattice
            .to_i64_rows()
            .expect("lattice entries fit in i64")
    }

    pub fn a_rows(&self) -> Vec<Vec<i64>> {
        self.a.to_i64_rows().expect("A entries fit in i64")
    }

    /// `A * gamma` evaluated in floating point.
    pub fn a_times(&self, gamma: &[Complex64]) -> Vec<Complex64> {
        (0..self.m())
            .map(|s| {
                self.a
                    .row(s)
                    .iter()
                    .zip(gamma)
                    .map(|(a, g)| g * a.to_f64().unwrap_or(f64::NAN))
                    .sum()
            })
            .collect()
    }
}

/// See [`GkzData::new`].
pub fn build_gkz_data(a: IntegerMatrix, lattice: Option<IntegerMatrix>) -> Result<GkzData> {
    GkzData::new(a, lattice)
}

/// Complex spectral vector `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector(Vec<Complex64>);

impl SpectralVector {
    pub fn new(gamma: Vec<Complex64>) -> Self {
        SpectralVector(gamma)
    }

    pub fn from_real(gamma: &[f64]) -> Self {
        SpectralVector(gamma.iter().map(|&g| Complex64::new(g, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Re gamma_i > 0` for every component.
    pub fn is_convergent(&self) -> bool {
        self.0.iter().all(|g| g.re > 0.0)
    }

    /// Copy with `delta` added to component `i`.
    pub fn shifted(&self, i: usize, delta: Complex64) -> Self {
        let mut g = self.0.clone();
        g[i] += delta;
        SpectralVector(g)
    }
}

impl From<Vec<Complex64>> for SpectralVector {
    fn from(v: Vec<Complex64>) -> Self {
        SpectralVector(v)
    }
}

/// Positive arguments `u`, stored together with their logarithms `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentVector {
    u: Vec<f64>,
    y: Vec<f64>,
}

impl ArgumentVector {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if let Some(bad) = u.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(GkzError::Invalid(format!(
                "arguments must be positive and finite, got {bad}"
            )));
        }
        let y = u.iter().map(|x| x.ln()).collect();
        Ok(ArgumentVector { u, y })
    }

    pub fn from_logs(y: Vec<f64>) -> Result<Self> {
        if let Some(bad) = y.iter().find(|x| !x.is_finite()) {
            return Err(GkzError::Invalid(format!(
                "log-arguments must be finite, got {bad}"
            )));
        }
        let u = y.iter().map(|x| x.exp()).collect();
        Ok(ArgumentVector { u, y })
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn logs(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Minimum-norm solution `gamma0` of `c + A gamma = 0`.
///
/// Every solution is `gamma0 + sum_alpha xi_alpha l^alpha`; the returned
/// matrix is the lattice basis spanning those directions.
pub fn solve_spectral_affine(
    data: &GkzData,
    c: &[Complex64],
) -> Result<(SpectralVector, IntegerMatrix)> {
    let m = data.m();
    let n = data.n();
    if c.len() != m {
        return Err(GkzError::Shape(format!(
            "c has length {}, expected {}",
            c.len(),
            m
        )));
    }
    if m == 0 {
        return Ok((
            SpectralVector(vec![Complex64::zero(); n]),
            data.lattice().clone(),
        ));
    }
    let a = DMatrix::from_fn(m, n, |i, j| data.a().get(i, j).to_f64().unwrap_or(f64::NAN));
    let gram = &a * a.transpose();
    let chol = gram
        .cholesky()
        .ok_or_else(|| GkzError::Internal("A A^T is not positive definite".into()))?;
    let rhs_re = DMatrix::from_fn(m, 1, |i, _| -c[i].re);
    let rhs_im = DMatrix::from_fn(m, 1, |i, _| -c[i].im);
    let w_re = chol.solve(&rhs_re);
    let w_im = chol.solve(&rhs_im);
    let g_re = a.transpose() * w_re;
    let g_im = a.transpose() * w_im;
    let gamma = (0..n)
        .map(|j| Complex64::new(g_re[(j, 0)], g_im[(j, 0)]))
        .collect();
    Ok((SpectralVector(gamma), data.lattice().clone()))
}

/// `gamma'_j = gamma_j + sum_alpha l^alpha_j xi_alpha`.
pub fn gauge_shift(
    gamma: &SpectralVector,
    data: &GkzData,
    xi: &[Complex64],
) -> Result<SpectralVector> {
    if gamma.len() != data.n() {
        return Err(GkzError::Shape(format!(
            "gamma has length {}, expected {}",
            gamma.len(),
            data.n()
        )));
    }
    if xi.len() != data.lattice_rank() {
        return Err(GkzError::Shape(format!(
            "xi has length {}, expected {}",
            xi.len(),
            data.lattice_rank()
        )));
    }
    let mut out = gamma.0.clone();
    for (alpha, x) in xi.iter().enumerate() {
        for (j, l) in data.lattice().row(alpha).iter().enumerate() {
            out[j] += x * l.to_f64().unwrap_or(f64::NAN);
        }
    }
    Ok(SpectralVector(out))
}

/// Replaces the lattice basis `M` by `g M` for a unimodular `g`.
pub fn change_lattice_basis(data: &GkzData, g: &IntegerMatrix) -> Result<GkzData> {
    let k = data.lattice_rank();
    if g.rows() != k || g.cols() != k {
        return Err(GkzError::Shape(format!(
            "basis change must be {k}x{k}, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    if !g.is_unimodular() {
        return Err(GkzError::NotUnimodular(g.determinant()?.to_string()));
    }
    let lattice = g.mul(data.lattice())?;
    GkzData::new(data.a().clone(), Some(lattice))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::random_unimodular;

    fn mat(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::new(rows).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gamma_function_data_has_empty_lattice() {
        let d = build_gkz_data(mat(&[vec![1]]), None).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.m(), 1);
        assert!(d.lattice().is_empty());
    }

    #[test]
    fn exponential_data_is_legal() {
        let d = GkzData::without_torus(mat(&[vec![1]])).unwrap();
        assert_eq!(d.m(), 0);
        assert_eq!(d.lattice_rows(), vec![vec![1]]);
    }

    #[test]
    fn non_primitive_lattice_rejected() {
        let err = build_gkz_data(mat(&[vec![1, 1]]), Some(mat(&[vec![2, -2]]))).unwrap_err();
        assert!(matches!(err, GkzError::NotPrimitiveLattice(_)));
        let err = build_gkz_data(mat(&[vec![1, 1]]), Some(mat(&[vec![1, 1]]))).unwrap_err();
        assert!(matches!(err, GkzError::NotPrimitiveLattice(_)));
        assert!(build_gkz_data(mat(&[vec![1, 1]]), Some(mat(&[vec![-1, 1]]))).is_ok());
    }

    #[test]
    fn non_generating_rejected() {
        let err = build_gkz_data(mat(&[vec![2, 4]]), None).unwrap_err();
        assert_eq!(err, GkzError::NotGenerating(1));
    }

    #[test]
    fn spectral_affine_examples() {
        let d = build_gkz_data(mat(&[vec![1]]), None).unwrap();
        let (g, dirs) = solve_spectral_affine(&d, &[c(-2.0)]).unwrap();
        assert!((g.as_slice()[0] - c(2.0)).norm() < 1e-14);
        assert!(dirs.is_empty());

        let d = build_gkz_data(mat(&[vec![1, -1]]), None).unwrap();
        let (g, dirs) = solve_spectral_affine(&d, &[c(0.0)]).unwrap();
        assert!(g.as_slice().iter().all(|x| x.norm() < 1e-14));
        assert_eq!(dirs, mat(&[vec![1, 1]]));

        let d = build_gkz_data(mat(&[vec![1, 1]]), None).unwrap();
        let (g, dirs) = solve_spectral_affine(&d, &[c(-3.0)]).unwrap();
        // Normal equations: gamma = A^T w with A A^T w = 3, so w = 1.5.
        assert!((g.as_slice()[0] - c(1.5)).norm() < 1e-14);
        assert!((g.as_slice()[1] - c(1.5)).norm() < 1e-14);
        assert_eq!(dirs, mat(&[vec![1, -1]]));
    }

    #[test]
    fn spectral_affine_residual_complex() {
        let a = mat(&[vec![1, -1, 0, 2], vec![0, 1, -1, 1]]);
        let d = build_gkz_data(a, None).unwrap();
        let cvec = [Complex64::new(0.3, -1.2), Complex64::new(-2.5, 0.7)];
        let (g, _) = solve_spectral_affine(&d, &cvec).unwrap();
        for (s, r) in d.a_times(g.as_slice()).iter().enumerate() {
            assert!((r + cvec[s]).norm() <= 1e-12);
        }
    }

    #[test]
    fn gauge_shift_examples() {
        let d = build_gkz_data(mat(&[vec![1, 1]]), None).unwrap();
        let g = SpectralVector::from_real(&[0.5, 0.5]);
        let s = gauge_shift(&g, &d, &[c(0.25)]).unwrap();
        assert_eq!(s, SpectralVector::from_real(&[0.75, 0.25]));
        assert_eq!(gauge_shift(&g, &d, &[c(0.0)]).unwrap(), g);
        assert!(gauge_shift(&g, &d, &[]).is_err());

        let d = build_gkz_data(mat(&[vec![1, -1, 0], vec![0, 1, -1]]), None).unwrap();
        let g = SpectralVector::from_real(&[1.0, 1.0, 1.0]);
        let s = gauge_shift(&g, &d, &[c(1.0)]).unwrap();
        assert_eq!(s, SpectralVector::from_real(&[2.0, 2.0, 2.0]));
    }

    #[test]
    fn lattice_basis_change() {
        let d = build_gkz_data(mat(&[vec![1, -1]]), None).unwrap();
        let same = change_lattice_basis(&d, &IntegerMatrix::identity(1)).unwrap();
        assert_eq!(same, d);
        let flipped = change_lattice_basis(&d, &mat(&[vec![-1]])).unwrap();
        assert_eq!(flipped.lattice(), &mat(&[vec![-1, -1]]));
        assert!(matches!(
            change_lattice_basis(&d, &mat(&[vec![2]])),
            Err(GkzError::NotUnimodular(_))
        ));

        let a = mat(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        let d = build_gkz_data(a, None).unwrap();
        let g = random_unimodular(2, 5).unwrap();
        let e = change_lattice_basis(&d, &g).unwrap();
        assert!(check_orthogonality(e.a(), e.lattice()).unwrap());
    }

    #[test]
    fn arguments_must_be_positive() {
        assert!(ArgumentVector::new(vec![1.0, 0.0]).is_err());
        assert!(ArgumentVector::new(vec![1.0, f64::NAN]).is_err());
        let u = ArgumentVector::new(vec![1.0, std::f64::consts::E]).unwrap();
        assert!((u.logs()[1] - 1.0).abs() < 1e-15);
    }
}
