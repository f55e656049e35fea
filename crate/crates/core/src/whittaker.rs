//! Whittaker functions of `gl(l+1)` as special Gelfand–Graev integrals:
//! the Gelfand–Zetlin graph data for the minimal parabolic case, the
//! one-lattice-vector data for the maximal parabolic case, and a Bessel-K
//! oracle for rank one.

use num_complex::Complex64;

use crate::error::{GkzError, Result};
use crate::eval::{evaluate_gg_with, Evaluation, PivotRule, QuadratureConfig};
use crate::lattice::IntegerMatrix;
use crate::model::{ArgumentVector, GkzData, SpectralVector};

/// Gelfand–Zetlin data of rank `ell`.
///
/// Variables are ordered as all `a_{k,i}` followed by all `b_{k,i}`, each
/// block in lexicographic `(k, i)` order with `1 <= i <= k <= ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct GzGraphData {
    ell: usize,
    data: GkzData,
}

impl GzGraphData {
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// `d = ell (ell + 1) / 2`.
    pub fn d(&self) -> usize {
        self.ell * (self.ell + 1) / 2
    }

    pub fn data(&self) -> &GkzData {
        &self.data
    }

    /// Position of `a_{k,i}` (1-based `k`, `i`).
    pub fn a_index(&self, k: usize, i: usize) -> usize {
        pair_index(k, i)
    }

    /// Position of `b_{k,i}` (1-based `k`, `i`).
    pub fn b_index(&self, k: usize, i: usize) -> usize {
        self.d() + pair_index(k, i)
    }

    /// Pivot preference placing every `b_{k,i}` with `i < k` first.
    pub fn pivot_preference(&self) -> PivotRule {
        let mut pref = Vec::new();
        for k in 1..=self.ell {
            for i in 1..k {
                pref.push(self.b_index(k, i));
            }
        }
        PivotRule::Prefer(pref)
    }
}

fn pair_index(k: usize, i: usize) -> usize {
    k * (k - 1) / 2 + (i - 1)
}

fn check_rank(ell: usize) -> Result<()> {
    if ell == 0 {
        return Err(GkzError::Invalid("rank must be at least 1".into()));
    }
    Ok(())
}

pub fn build_gz_data(ell: usize) -> Result<GzGraphData> {
    check_rank(ell)?;
    let d = ell * (ell + 1) / 2;
    let n = 2 * d;
    let a_at = |k: usize, i: usize| pair_index(k, i);
    let b_at = |k: usize, i: usize| d + pair_index(k, i);
    let mut lattice = Vec::with_capacity(d);
    let mut a = Vec::with_capacity(d);
    for k in 1..=ell {
        for i in 1..=k {
            let mut l = vec![0i64; n];
            l[a_at(k, i)] += 1;
            l[b_at(k, i)] += 1;
            if k < ell {
                l[a_at(k + 1, i + 1)] -= 1;
                l[b_at(k + 1, i)] -= 1;
            }
            lattice.push(l);

            let mut row = vec![0i64; n];
            for j in 1..i {
                row[a_at(k - j, i - j)] += 1;
            }
            for j in i..=k {
                row[a_at(k, j)] += 1;
                row[b_at(k, j)] -= 1;
            }
            a.push(row);
        }
    }
    let data = GkzData::new(IntegerMatrix::new(&a)?, Some(IntegerMatrix::new(&lattice)?))?;
    Ok(GzGraphData { ell, data })
}

/// Spectral vector `(gamma(lambda), nu(lambda))` in the variable order of
/// [`GzGraphData`].
pub fn gz_spectrum(ell: usize, lambda: &[Complex64]) -> Result<SpectralVector> {
    check_rank(ell)?;
    if lambda.len() != ell + 1 {
        return Err(GkzError::Shape(format!(
            "lambda has length {}, expected {}",
            lambda.len(),
            ell + 1
        )));
    }
    let d = ell * (ell + 1) / 2;
    let mut g = vec![Complex64::new(0.0, 0.0); 2 * d];
    for k in 1..=ell {
        let partial: Complex64 = lambda[..k].iter().sum();
        for i in 1..=k {
            g[pair_index(k, i)] = lambda[k];
            if i == k {
                g[d + pair_index(k, i)] = partial;
            }
        }
    }
    Ok(SpectralVector::new(g))
}

/// Canonical representative of the restriction: `z = 0`,
/// `y_{l,i} = x_i - x_{i+1}` and `y_{k,i} = y_{k+1,i+1}` below the top row.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedArguments {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl RestrictedArguments {
    /// Logarithms of all arguments in the variable order of [`GzGraphData`].
    pub fn logs(&self) -> Vec<f64> {
        self.y.iter().chain(&self.z).copied().collect()
    }

    /// `R_i = y_{l,i} + z_{l,i}`.
    pub fn r(&self, ell: usize) -> Vec<f64> {
        (1..=ell)
            .map(|i| self.y[pair_index(ell, i)] + self.z[pair_index(ell, i)])
            .collect()
    }

    /// `B_{k,i} = y_{k,i} + z_{k,i} - y_{k+1,i+1} - z_{k+1,i}` for `k < l`.
    pub fn b(&self, ell: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 1..ell {
            for i in 1..=k {
                out.push(
                    self.y[pair_index(k, i)] + self.z[pair_index(k, i)]
                        - self.y[pair_index(k + 1, i + 1)]
                        - self.z[pair_index(k + 1, i)],
                );
            }
        }
        out
    }
}

pub fn restrict_arguments(ell: usize, x: &[f64]) -> Result<RestrictedArguments> {
    check_rank(ell)?;
    if x.len() != ell + 1 {
        return Err(GkzError::Shape(format!(
            "x has length {}, expected {}",
            x.len(),
            ell + 1
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(GkzError::Invalid("x must be finite".into()));
    }
    let d = ell * (ell + 1) / 2;
    let mut y = vec![0.0; d];
    for i in 1..=ell {
        y[pair_index(ell, i)] = x[i - 1] - x[i];
    }
    for k in (1..ell).rev() {
        for i in 1..=k {
            y[pair_index(k, i)] = y[pair_index(k + 1, i + 1)];
        }
    }
    let out = RestrictedArguments {
        x: x.to_vec(),
        y,
        z: vec![0.0; d],
    };
    debug_assert!(out.b(ell).iter().all(|b| *b == 0.0));
    debug_assert!(out
        .r(ell)
        .iter()
        .zip(x.windows(2))
        .all(|(r, w)| *r == w[0] - w[1]));
    Ok(out)
}

/// `Psi_lambda(e^x) = e^{(sum lambda) x_{l+1}} resPhi(e^x)`.
pub fn eval_whittaker_min(
    ell: usize,
    lambda: &[Complex64],
    x: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    let gz = build_gz_data(ell)?;
    let gamma = gz_spectrum(ell, lambda)?;
    let args = restrict_arguments(ell, x)?;
    let u = ArgumentVector::from_logs(args.logs())?;
    let e = evaluate_gg_with(gz.data(), &gamma, &u, cfg, &gz.pivot_preference())?;
    let total: Complex64 = lambda.iter().sum();
    let pre = (total * x[ell]).exp();
    Ok(Evaluation {
        value: e.value * pre,
        err: e.err * pre.norm(),
    })
}

/// Extended data `M^ = diag(M, 1)`, `A^ = [A | 0]`: one extra variable
/// pinned by its own lattice vector.
pub fn build_extended_data(ell: usize) -> Result<GkzData> {
    let gz = build_gz_data(ell)?;
    let base = gz.data();
    let extend = |rows: Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        rows.into_iter()
            .map(|mut r| {
                r.push(0);
                r
            })
            .collect()
    };
    let a = extend(base.a_rows());
    let mut m = extend(base.lattice_rows());
    let mut last = vec![0i64; base.n() + 1];
    last[base.n()] = 1;
    m.push(last);
    GkzData::new(IntegerMatrix::new(&a)?, Some(IntegerMatrix::new(&m)?))
}

/// Maximal parabolic data: `A` the `l x (l+1)` difference matrix,
/// `M = (1, ..., 1)`.
pub fn build_max_parabolic_data(ell: usize) -> Result<GkzData> {
    check_rank(ell)?;
    let n = ell + 1;
    let a: Vec<Vec<i64>> = (0..ell)
        .map(|j| {
            let mut r = vec![0; n];
            r[j] = 1;
            r[j + 1] = -1;
            r
        })
        .collect();
    GkzData::new(
        IntegerMatrix::new(&a)?,
        Some(IntegerMatrix::new(&[vec![1i64; n]])?),
    )
}

/// Canonical arguments of the maximal parabolic function: `y_1 = x`, the
/// other logarithms zero.
pub fn max_parabolic_arguments(ell: usize, x: f64) -> Result<ArgumentVector> {
    check_rank(ell)?;
    let mut y = vec![0.0; ell + 1];
    y[0] = x;
    ArgumentVector::from_logs(y)
}

/// `int prod (dt_i / t_i) t_i^{lambda_i} e^{-t_i} delta(e^{-x} prod t_j - 1)`.
pub fn eval_whittaker_max(
    ell: usize,
    lambda: &[Complex64],
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    if lambda.len() != ell + 1 {
        return Err(GkzError::Shape(format!(
            "lambda has length {}, expected {}",
            lambda.len(),
            ell + 1
        )));
    }
    let data = build_max_parabolic_data(ell)?;
    let u = max_parabolic_arguments(ell, x)?;
    evaluate_gg_with(
        &data,
        &SpectralVector::new(lambda.to_vec()),
        &u,
        cfg,
        &PivotRule::FirstValid,
    )
}

/// `K_nu(z) = (1/2) int_R exp(nu s - z cosh s) ds`, by a trapezoid rule
/// centred on the maximiser of the real exponent.
pub fn bessel_k_oracle(nu: Complex64, z: f64) -> Result<Complex64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GkzError::Invalid(format!("K_nu(z) needs z > 0, got {z}")));
    }
    let expo = |s: f64| nu.re * s - z * s.cosh();
    let center = (nu.re / z).asinh();
    let peak = expo(center);
    let reach = |dir: f64| {
        let mut r = 1.0;
        while expo(center + dir * r) - peak > -45.0 {
            r *= 1.5;
        }
        r
    };
    let lo = center - reach(-1.0);
    let hi = center + reach(1.0);
    let sum = |n: usize| {
        let h = (hi - lo) / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let s = lo + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += w * (nu * s - z * s.cosh() - peak).exp();
        }
        0.5 * h * acc * peak.exp()
    };
    let mut n = 256;
    let mut prev = sum(n);
    loop {
        n *= 2;
        let next = sum(n);
        if (next - prev).norm() <= 1e-15 * next.norm() || n >= 1 << 16 {
            return Ok(next);
        }
        prev = next;
    }
}
