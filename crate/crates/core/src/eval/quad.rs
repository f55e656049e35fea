//! Laplace-centred tensor trapezoid rule for integrands of the form
//! `exp(alpha . T - sum_i exp(T_i + shift_i))` on the affine subspace
//! `T = B s + base`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::chamber::gauge_positive;
use super::reduce::ReducedIntegral;
use super::QuadratureConfig;
use crate::error::{GkzError, Result};

/// Exponents larger than this take the slow, overflow-safe path.
const FAST_LIMIT: f64 = 600.0;
/// Points more than this far below the peak (in log scale) are dropped.
const NEGLIGIBLE: f64 = -80.0;

#[derive(Debug, Clone)]
pub(crate) struct LogIntegrand {
    n: usize,
    m: usize,
    embed: Vec<f64>,
    base: Vec<f64>,
    shift: Vec<f64>,
    alpha: Vec<Complex64>,
    scale: f64,
}

impl LogIntegrand {
    pub(crate) fn new(
        reduced: &ReducedIntegral,
        alpha: &[Complex64],
        shift: Option<&[f64]>,
    ) -> Self {
        let n = reduced.n();
        LogIntegrand {
            n,
            m: reduced.free_dim(),
            embed: reduced.embedding().to_vec(),
            base: reduced.offset().to_vec(),
            shift: shift.map_or_else(|| vec![0.0; n], <[f64]>::to_vec),
            alpha: alpha.to_vec(),
            scale: reduced.jacobian_f64(),
        }
    }

    /// Same subspace and shifts, different `alpha` and `base`.
    pub(crate) fn with(&self, reduced: &ReducedIntegral, alpha: &[Complex64]) -> Self {
        LogIntegrand {
            base: reduced.offset().to_vec(),
            alpha: alpha.to_vec(),
            ..self.clone()
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.m
    }

    /// Rejects `alpha` unless the integral converges: some real lattice
    /// shift of `Re alpha` must be componentwise positive. If the exact test
    /// is too large, falls back to a sufficient condition.
    pub(crate) fn check_chamber(&self, reduced: &ReducedIntegral) -> Result<()> {
        if self.m == 0 {
            return Ok(());
        }
        let re: Vec<f64> = self.alpha.iter().map(|a| a.re).collect();
        if re.iter().any(|x| !x.is_finite()) {
            return Err(GkzError::Invalid("spectral vector must be finite".into()));
        }
        match gauge_positive(&re, reduced.lattice_exact()) {
            Some(true) => Ok(()),
            Some(false) => Err(GkzError::Chamber(
                "no lattice shift of Re gamma is componentwise positive".into(),
            )),
            None => {
                if let Some((i, a)) = re.iter().enumerate().find(|(_, a)| **a < 0.0) {
                    return Err(GkzError::Chamber(format!(
                        "Re gamma_{} = {} is negative",
                        i + 1,
                        a
                    )));
                }
                let positive: Vec<usize> = (0..self.n).filter(|&i| re[i] > 0.0).collect();
                if positive.len() < self.n && reduced.embedding_rank(&positive) < self.m {
                    return Err(GkzError::Chamber(
                        "components with Re gamma_i = 0 leave a non-decaying direction".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn point(&self, s: &[f64]) -> Vec<f64> {
        let mut t = self.base.clone();
        for (j, sj) in s.iter().enumerate() {
            let col = &self.embed[j * self.n..(j + 1) * self.n];
            for (ti, b) in t.iter_mut().zip(col) {
                *ti += b * sj;
            }
        }
        t
    }

    /// Real part of the exponent.
    fn phi(&self, s: &[f64]) -> f64 {
        let t = self.point(s);
        t.iter()
            .zip(&self.alpha)
            .zip(&self.shift)
            .map(|((ti, a), sh)| a.re * ti - (ti + sh).exp())
            .sum()
    }

    /// Gradient and negated Hessian of [`Self::phi`].
    fn derivatives(&self, s: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let t = self.point(s);
        let w: Vec<f64> = t
            .iter()
            .zip(&self.shift)
            .map(|(ti, sh)| (ti + sh).exp())
            .collect();
        let b = DMatrix::from_column_slice(self.n, self.m, &self.embed);
        let r = DVector::from_fn(self.n, |i, _| self.alpha[i].re - w[i]);
        let grad = b.transpose() * r;
        let wb = DMatrix::from_fn(self.n, self.m, |i, j| w[i] * b[(i, j)]);
        let neg_hess = b.transpose() * wb;
        (grad, neg_hess)
    }

    /// Value at `m = 0`, where the subspace is a single point.
    pub(crate) fn point_value(&self) -> Complex64 {
        let mut e = Complex64::new(0.0, 0.0);
        for i in 0..self.n {
            e += self.alpha[i] * self.base[i] - (self.base[i] + self.shift[i]).exp();
        }
        e.exp() * self.scale
    }

    /// Damped Newton iteration for the maximiser of [`Self::phi`].
    pub(crate) fn find_mode(&self) -> Result<Vec<f64>> {
        let b = DMatrix::from_column_slice(self.n, self.m, &self.embed);
        let alpha_re = DVector::from_fn(self.n, |i, _| self.alpha[i].re);
        let tol = 1e-10 * (1.0 + (b.transpose() * alpha_re).amax());
        let mut s = vec![0.0; self.m];
        let mut f = self.phi(&s);
        for _ in 0..500 {
            let (g, h) = self.derivatives(&s);
            if !g.iter().all(|x| x.is_finite()) {
                return Err(GkzError::ModeSearch("non-finite gradient".into()));
            }
            if g.norm() <= tol {
                return Ok(s);
            }
            let step = h
                .cholesky()
                .ok_or_else(|| GkzError::ModeSearch("Hessian lost definiteness".into()))?
                .solve(&g);
            let slope = g.dot(&step);
            if slope <= 1e-12 * (1.0 + f.abs()) {
                // Inside the quadratic region the gain is below the rounding of f.
                let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
                let ft = self.phi(&trial);
                if ft.is_finite() {
                    s = trial;
                    f = ft;
                    continue;
                }
            }
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = s.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
                let ft = self.phi(&trial);
                if ft.is_finite() && ft >= f + 1e-4 * t * slope {
                    s = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                // No ascent is possible at working precision.
                let (g, _) = self.derivatives(&s);
                if g.norm() <= 1e3 * tol {
                    return Ok(s);
                }
                return Err(GkzError::ModeSearch(format!(
                    "line search failed, |grad| = {:e}",
                    g.norm()
                )));
            }
        }
        Err(GkzError::ModeSearch("iteration limit reached".into()))
    }
}

/// Sampling box in whitened coordinates `z`, with `s = center + W z` and
/// `W^T (-Hess) W = I` at the mode.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPlan {
    center: Vec<f64>,
    whiten: Vec<f64>,
    det: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl GridPlan {
    pub(crate) fn build(f: &LogIntegrand, cfg: &QuadratureConfig) -> Result<Self> {
        let m = f.m;
        let center = f.find_mode()?;
        let (_, h) = f.derivatives(&center);
        let chol = h
            .cholesky()
            .ok_or_else(|| GkzError::ModeSearch("Hessian at the mode is not definite".into()))?;
        let l = chol.l();
        let w = l
            .transpose()
            .try_inverse()
            .ok_or_else(|| GkzError::Internal("singular Cholesky factor".into()))?;
        let det = w.determinant().abs();
        let mut plan = GridPlan {
            center,
            whiten: w.as_slice().to_vec(),
            det,
            lo: vec![0.0; m],
            hi: vec![0.0; m],
        };
        let peak = f.phi(&plan.center);
        let floor = cfg.tail_tolerance.ln();
        let drop = |z: &[f64]| f.phi(&plan.s_of(z)) - peak;
        let mut lo = vec![0.0; m];
        let mut hi = vec![0.0; m];
        for k in 0..m {
            for sign in [-1.0, 1.0] {
                let along = |r: f64| {
                    let mut z = vec![0.0; m];
                    z[k] = sign * r;
                    drop(&z)
                };
                let r = edge(along, floor, cfg.max_halfwidth).ok_or(GkzError::BoxGrowth {
                    axis: k,
                    limit: cfg.max_halfwidth,
                })?;
                if sign < 0.0 {
                    lo[k] = -r;
                } else {
                    hi[k] = r;
                }
            }
        }
        if m >= 2 {
            expand_faces(&drop, floor, cfg.max_halfwidth, &mut lo, &mut hi)?;
        }
        plan.lo = lo;
        plan.hi = hi;
        Ok(plan)
    }

    fn s_of(&self, z: &[f64]) -> Vec<f64> {
        let m = self.center.len();
        let mut s = self.center.clone();
        for (j, zj) in z.iter().enumerate() {
            for (i, si) in s.iter_mut().enumerate() {
                *si += self.whiten[j * m + i] * zj;
            }
        }
        s
    }

    /// Mode of the integrand the plan was built for.
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Per-axis extents `(lo, hi)` in whitened coordinates.
    pub fn extents(&self) -> Vec<(f64, f64)> {
        self.lo
            .iter()
            .copied()
            .zip(self.hi.iter().copied())
            .collect()
    }

    /// Tensor trapezoid rule with `n` points per axis.
    pub(crate) fn integrate(&self, f: &LogIntegrand, n: usize) -> Complex64 {
        let m = f.m;
        let nn = f.n;
        let step: Vec<f64> = (0..m)
            .map(|k| (self.hi[k] - self.lo[k]) / (n - 1) as f64)
            .collect();
        let nodes: Vec<Vec<f64>> = (0..m)
            .map(|k| (0..n).map(|j| self.lo[k] + j as f64 * step[k]).collect())
            .collect();
        let weight = |j: usize| if j == 0 || j == n - 1 { 0.5 } else { 1.0 };

        // C = B W, column k is the direction of T along whitened axis k.
        let mut cmat = vec![0.0; nn * m];
        for k in 0..m {
            for j in 0..m {
                let wjk = self.whiten[k * m + j];
                for i in 0..nn {
                    cmat[k * nn + i] += f.embed[j * nn + i] * wjk;
                }
            }
        }
        let t0 = f.point(&self.center);
        let x0: Vec<f64> = t0.iter().zip(&f.shift).map(|(t, s)| t + s).collect();
        let lin0: f64 = t0.iter().zip(&f.alpha).map(|(t, a)| a.re * t).sum();
        let im0: f64 = t0.iter().zip(&f.alpha).map(|(t, a)| a.im * t).sum();
        let peak = lin0 - x0.iter().map(|x| x.exp()).sum::<f64>();
        let complex = f.alpha.iter().any(|a| a.im != 0.0);
        let dir_re: Vec<f64> = (0..m)
            .map(|k| (0..nn).map(|i| f.alpha[i].re * cmat[k * nn + i]).sum())
            .collect();
        let dir_im: Vec<f64> = (0..m)
            .map(|k| (0..nn).map(|i| f.alpha[i].im * cmat[k * nn + i]).sum())
            .collect();

        let last = m - 1;
        let last_col = &cmat[last * nn..(last + 1) * nn];
        let last_exps: Vec<f64> = nodes[last]
            .iter()
            .flat_map(|z| last_col.iter().map(move |c| (c * z).exp()))
            .collect();
        let last_fast = nodes[last]
            .iter()
            .all(|z| last_col.iter().all(|c| (c * z).abs() <= FAST_LIMIT));

        let line = |xo: &[f64], lin_o: f64, im_o: f64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            let fast = last_fast && xo.iter().all(|&x| x <= FAST_LIMIT);
            let p: Vec<f64> = if fast {
                xo.iter().map(|x| x.exp()).collect()
            } else {
                Vec::new()
            };
            for j in 0..n {
                let z = nodes[last][j];
                let sum = if fast {
                    let e = &last_exps[j * nn..(j + 1) * nn];
                    p.iter().zip(e).map(|(a, b)| a * b).sum::<f64>()
                } else {
                    xo.iter()
                        .zip(last_col)
                        .map(|(x, c)| (x + c * z).exp())
                        .sum::<f64>()
                };
                let e = lin_o + dir_re[last] * z - sum - peak;
                if !(e > NEGLIGIBLE) {
                    continue;
                }
                let mag = weight(j) * e.exp();
                if complex {
                    let (sn, cs) = (im_o + dir_im[last] * z).sin_cos();
                    acc += Complex64::new(mag * cs, mag * sn);
                } else {
                    acc.re += mag;
                }
            }
            acc
        };

        let total = if m == 1 {
            line(&x0, lin0, im0)
        } else {
            let outer_dims = m - 1;
            let slices: Vec<Complex64> = (0..n)
                .into_par_iter()
                .map(|j0| {
                    let mut idx = vec![0usize; outer_dims];
                    idx[0] = j0;
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut xo = vec![0.0; nn];
                    loop {
                        let mut lin_o = lin0;
                        let mut im_o = im0;
                        let mut wgt = 1.0;
                        xo.copy_from_slice(&x0);
                        for (k, &jk) in idx.iter().enumerate() {
                            let z = nodes[k][jk];
                            lin_o += dir_re[k] * z;
                            im_o += dir_im[k] * z;
                            wgt *= weight(jk);
                            let col = &cmat[k * nn..(k + 1) * nn];
                            for (x, c) in xo.iter_mut().zip(col) {
                                *x += c * z;
                            }
                        }
                        acc += line(&xo, lin_o, im_o) * wgt;
                        // Odometer over the axes after the first.
                        let mut k = outer_dims - 1;
                        loop {
                            if k == 0 {
                                return acc;
                            }
                            idx[k] += 1;
                            if idx[k] < n {
                                break;
                            }
                            idx[k] = 0;
                            k -= 1;
                        }
                    }
                })
                .collect();
            pairwise_sum(&slices)
        };
        let cell: f64 = step.iter().product();
        total * (cell * self.det * f.scale * peak.exp())
    }
}

/// Distance `r` at which `along(r)` first falls to `floor`, assuming
/// `along(0) = 0` and `along` decreasing; `None` if beyond `limit`.
fn edge(along: impl Fn(f64) -> f64, floor: f64, limit: f64) -> Option<f64> {
    let mut inner = 0.0;
    let mut outer = 1.0_f64.min(limit);
    loop {
        let v = along(outer);
        if !(v > floor) {
            break;
        }
        if outer >= limit {
            return None;
        }
        inner = outer;
        outer = (outer * 2.0).min(limit);
    }
    for _ in 0..60 {
        let mid = 0.5 * (inner + outer);
        if along(mid) > floor {
            inner = mid;
        } else {
            outer = mid;
        }
        if outer - inner < 1e-6 * outer {
            break;
        }
    }
    Some(outer)
}

/// Pushes out any face of the box on which the integrand is still above
/// the tail threshold.
fn expand_faces(
    drop: &impl Fn(&[f64]) -> f64,
    floor: f64,
    limit: f64,
    lo: &mut [f64],
    hi: &mut [f64],
) -> Result<()> {
    const SAMPLES: usize = 17;
    let m = lo.len();
    for _round in 0..64 {
        let mut grew = false;
        for k in 0..m {
            for upper in [false, true] {
                let fixed = if upper { hi[k] } else { lo[k] };
                let mut worst = f64::NEG_INFINITY;
                let others: Vec<usize> = (0..m).filter(|&j| j != k).collect();
                let mut idx = vec![0usize; others.len()];
                let mut z = vec![0.0; m];
                'face: loop {
                    z[k] = fixed;
                    for (o, &j) in others.iter().zip(&idx) {
                        z[*o] = lo[*o] + (hi[*o] - lo[*o]) * j as f64 / (SAMPLES - 1) as f64;
                    }
                    worst = worst.max(drop(&z));
                    for p in 0..idx.len() {
                        idx[p] += 1;
                        if idx[p] < SAMPLES {
                            continue 'face;
                        }
                        idx[p] = 0;
                    }
                    break;
                }
                if worst > floor {
                    let side = if upper { &mut hi[k] } else { &mut lo[k] };
                    if side.abs() >= limit {
                        return Err(GkzError::BoxGrowth { axis: k, limit });
                    }
                    *side = (*side * 1.25).clamp(-limit, limit);
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(());
        }
    }
    Err(GkzError::BoxGrowth { axis: 0, limit })
}

/// Sum in a fixed binary-tree order.
pub(crate) fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
