//! Pairings of the distribution `phi_L` against a family of test functions,
//! and the invariance of the pairing between `pi_gamma` and its dual.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{represent, represent_dual, Generator, WeylElement};
use crate::error::{GkzError, Result};
use crate::eval::{integrate, Evaluation, QuadratureConfig, ReducedIntegral};
use crate::model::{GkzData, SpectralVector};

/// `coeff * prod_i t_i^{p_i} exp(-q_i t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    coeff: Complex64,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl TestFunction {
    pub fn new(coeff: Complex64, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() {
            return Err(GkzError::Shape("p and q differ in length".into()));
        }
        if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(GkzError::Invalid(
                "exponents p must be finite and non-negative".into(),
            ));
        }
        if q.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(GkzError::Invalid("rates q must be positive".into()));
        }
        Ok(TestFunction { coeff, p, q })
    }

    /// `exp(-sum_i t_i)`.
    pub fn right_vector(n: usize) -> Self {
        TestFunction {
            coeff: Complex64::new(1.0, 0.0),
            p: vec![0.0; n],
            q: vec![1.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// `exp(sum_j y_j pi_gamma(H_j))` applied to the function. Each factor
    /// acts as `t_j -> e^{y_j} t_j` times `e^{gamma_j y_j}`.
    pub fn torus_action(&self, gamma: &[Complex64], y: &[f64]) -> Result<Self> {
        if gamma.len() != self.len() || y.len() != self.len() {
            return Err(GkzError::Shape("torus action dimensions differ".into()));
        }
        let mut log = Complex64::new(0.0, 0.0);
        for j in 0..self.len() {
            log += (gamma[j] + self.p[j]) * y[j];
        }
        Ok(TestFunction {
            coeff: self.coeff * log.exp(),
            p: self.p.clone(),
            q: self.q.iter().zip(y).map(|(q, yj)| q * yj.exp()).collect(),
        })
    }

    /// Product with the Laurent monomial `t^l`.
    pub fn times_monomial(&self, l: &[i64]) -> Self {
        TestFunction {
            coeff: self.coeff,
            p: self.p.iter().zip(l).map(|(p, li)| p + *li as f64).collect(),
            q: self.q.clone(),
        }
    }
}

/// `<phi_L, phi> = int prod (dt_i / t_i) t_i^{gamma_i} prod_alpha delta(t^{l^alpha} - 1) phi(t)`.
///
/// In logarithmic coordinates the integrand is
/// `coeff exp((gamma + p) . T - sum q_i e^{T_i})` on `M T = 0`.
pub fn phi_l_pairing(
    data: &GkzData,
    gamma: &SpectralVector,
    f: &TestFunction,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    let n = data.n();
    if gamma.len() != n || f.len() != n {
        return Err(GkzError::Shape(format!("pairing needs {n} components")));
    }
    let reduced = ReducedIntegral::new(data, &vec![0.0; n])?;
    let alpha: Vec<Complex64> = gamma
        .as_slice()
        .iter()
        .zip(&f.p)
        .map(|(g, p)| g + p)
        .collect();
    let shift: Vec<f64> = f.q.iter().map(|q| q.ln()).collect();
    let e = integrate(&reduced, &alpha, Some(&shift), cfg)?;
    Ok(Evaluation {
        value: e.value * f.coeff,
        err: e.err * f.coeff.norm(),
    })
}

/// `<phi_L, exp(sum_j y_j pi(H_j)) phi_R>` with `phi_R = exp(-sum t_i)` and
/// `y = log u`.
pub fn matrix_element(
    data: &GkzData,
    gamma: &SpectralVector,
    y: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    let f = TestFunction::right_vector(data.n()).torus_action(gamma.as_slice(), y)?;
    phi_l_pairing(data, gamma, &f, cfg)
}

/// Relative size of `<(prod_i pi'(F_i)^{l_i} - 1) phi_L, phi>` for a lattice
/// vector `l`; `pi'(F_i)` is multiplication by `t_i`.
pub fn phi_l_relation_residual(
    data: &GkzData,
    gamma: &SpectralVector,
    f: &TestFunction,
    l: &[i64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !data.in_lattice(l) {
        return Err(GkzError::NotInLattice(l.to_vec()));
    }
    let shifted = phi_l_pairing(data, gamma, &f.times_monomial(l), cfg)?.value;
    let plain = phi_l_pairing(data, gamma, f, cfg)?.value;
    let scale = shifted.norm().max(plain.norm());
    Ok(if scale > 0.0 {
        (shifted - plain).norm() / scale
    } else {
        0.0
    })
}

/// `sum_k c_k prod_i t_i^{a_ki} exp(-b_ki t_i^2)` on the positive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMonomialSum {
    n: usize,
    terms: Vec<(f64, Vec<u32>, Vec<f64>)>,
}

impl GaussianMonomialSum {
    pub fn new(n: usize) -> Self {
        GaussianMonomialSum {
            n,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, c: f64, a: Vec<u32>, b: Vec<f64>) -> Result<Self> {
        if a.len() != self.n || b.len() != self.n {
            return Err(GkzError::Shape("term dimension mismatch".into()));
        }
        if b.iter().any(|x| !(*x > 0.0)) {
            return Err(GkzError::Invalid("Gaussian widths must be positive".into()));
        }
        self.terms.push((c, a, b));
        Ok(self)
    }

    /// Action of a normal-ordered differential operator.
    pub fn apply(&self, op: &WeylElement<BigRational>) -> Result<Self> {
        if op.n() != self.n {
            return Err(GkzError::Shape("operator dimension mismatch".into()));
        }
        let mut out = GaussianMonomialSum::new(self.n);
        for (ta, db, c) in op.terms() {
            let c = c.to_f64().unwrap_or(f64::NAN);
            for (fc, a, b) in &self.terms {
                let mut parts = vec![(c * fc, a.clone())];
                for i in 0..self.n {
                    for _ in 0..db[i] {
                        let mut next = Vec::with_capacity(2 * parts.len());
                        for (w, e) in &parts {
                            if e[i] > 0 {
                                let mut lo = e.clone();
                                lo[i] -= 1;
                                next.push((w * f64::from(e[i]), lo));
                            }
                            let mut hi = e.clone();
                            hi[i] += 1;
                            next.push((-2.0 * b[i] * w, hi));
                        }
                        parts = next;
                    }
                }
                for (w, mut e) in parts {
                    for i in 0..self.n {
                        e[i] += ta[i];
                    }
                    out.terms.push((w, e, b.clone()));
                }
            }
        }
        Ok(out)
    }

    /// `int_{R_+^n} dt self(t) other(t)`.
    pub fn pair(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (c1, a1, b1) in &self.terms {
            for (c2, a2, b2) in &other.terms {
                let mut prod = c1 * c2;
                for i in 0..self.n {
                    prod *= half_line_moment(a1[i] + a2[i], b1[i] + b2[i]);
                }
                acc += prod;
            }
        }
        acc
    }
}

/// `int_0^inf t^a exp(-b t^2) dt` by the trapezoid rule in `s = log t`.
fn half_line_moment(a: u32, b: f64) -> f64 {
    let k = f64::from(a) + 1.0;
    let expo = |s: f64| k * s - b * (2.0 * s).exp();
    let center = 0.5 * (k / (2.0 * b)).ln();
    let peak = expo(center);
    let lo = center - 45.0 / k - 1.0;
    let hi = center + 3.0;
    let steps = 4000;
    let h = (hi - lo) / f64::from(steps);
    let mut acc = 0.0;
    for j in 0..=steps {
        let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
        acc += w * (expo(lo + f64::from(j) * h) - peak).exp();
    }
    acc * h * peak.exp()
}

/// Relative gap between `<pi'(X) phi, psi>` and `-<phi, pi(X) psi>`.
pub fn dual_pairing_defect(
    x: Generator,
    gamma: &[BigRational],
    phi: &GaussianMonomialSum,
    psi: &GaussianMonomialSum,
) -> Result<f64> {
    let lhs = phi.apply(&represent_dual(x, gamma)?)?.pair(psi);
    let rhs = -phi.pair(&psi.apply(&represent(x, gamma)?)?);
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix;
    use crate::model::build_gkz_data;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn gamma_data_pairing_is_gamma_function() {
        let d = build_gkz_data(IntegerMatrix::new(&[vec![1]]).unwrap(), None).unwrap();
        let g = SpectralVector::from_real(&[3.0]);
        let v = phi_l_pairing(&d, &g, &TestFunction::right_vector(1), &cfg())
            .unwrap()
            .value;
        assert!((v.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_data_pairing_pins_t() {
        let d = GkzData::without_torus(IntegerMatrix::new(&[vec![1]]).unwrap()).unwrap();
        let g = SpectralVector::from_real(&[0.7]);
        let v = phi_l_pairing(&d, &g, &TestFunction::right_vector(1), &cfg())
            .unwrap()
            .value;
        assert!((v.re - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn moments_match_closed_form() {
        // int t e^{-t^2} = 1/2, int e^{-t^2} = sqrt(pi)/2.
        assert!((half_line_moment(1, 1.0) - 0.5).abs() < 1e-13);
        assert!((half_line_moment(0, 1.0) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn dual_pairing_for_h() {
        let g = [BigRational::new(3.into(), 2.into())];
        let phi = GaussianMonomialSum::new(1)
            .with_term(1.0, vec![2], vec![1.0])
            .unwrap();
        let psi = GaussianMonomialSum::new(1)
            .with_term(0.5, vec![1], vec![0.7])
            .unwrap();
        let d = dual_pairing_defect(Generator::H(0), &g, &phi, &psi).unwrap();
        assert!(d <= 1e-8, "{d}");
    }
}
