//! Numerical residuals of the differential and difference equations
//! satisfied by `Phi_gamma(u)`.
//!
//! Derivatives are nested central differences with relative step `h u_i`
//! (or step `h` in `gamma_i`), evaluated on a quadrature grid frozen at the
//! base point so the differences only see the smooth dependence on the
//! parameters.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GkzError, Result};
use crate::eval::{FrozenEvaluator, PivotRule, QuadratureConfig};
use crate::model::{ArgumentVector, GkzData, SpectralVector};
use crate::whittaker::{build_max_parabolic_data, max_parabolic_arguments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationId {
    LatticePde,
    TorusPde,
    DualDifference,
    SpectralLinear,
    Contiguity,
    ReducedOde,
}

/// One residual. `params` holds the lattice vector for the lattice
/// families, the 1-based row or variable index for the torus and
/// contiguity families, and the rank for the reduced equation. `step` is
/// zero for the exact difference family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation: EquationId,
    pub params: Vec<i64>,
    #[serde(rename = "abs")]
    pub absolute_residual: f64,
    #[serde(rename = "rel")]
    pub relative_residual: f64,
    pub step: f64,
}

impl ResidualReport {
    fn new(
        equation: EquationId,
        params: Vec<i64>,
        residual: Complex64,
        scale: f64,
        step: f64,
    ) -> Self {
        let abs = residual.norm();
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        ResidualReport {
            equation,
            params,
            absolute_residual: abs,
            relative_residual: rel,
            step,
        }
    }
}

type Offset = Vec<i32>;

/// Linear combination of `Phi` values at lattice-shifted arguments.
#[derive(Debug, Clone, Default)]
struct Stencil(BTreeMap<Offset, Complex64>);

impl Stencil {
    fn unit(dim: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(vec![0; dim], Complex64::new(1.0, 0.0));
        Stencil(m)
    }

    fn push(&mut self, k: Offset, c: Complex64) {
        *self.0.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }
}

/// `Phi` at `u_i (1 + k_i h)`, cached per offset, on a frozen grid.
struct Probe<'a> {
    eval: FrozenEvaluator,
    gamma: &'a [Complex64],
    u: &'a [f64],
    h: f64,
    cache: RefCell<HashMap<Offset, Complex64>>,
    shifted: RefCell<HashMap<usize, Complex64>>,
}

impl<'a> Probe<'a> {
    fn new(
        data: &GkzData,
        gamma: &'a SpectralVector,
        u: &'a ArgumentVector,
        h: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if !(h > 0.0 && h < 0.5) {
            return Err(GkzError::Invalid(format!(
                "finite-difference step must lie in (0, 0.5), got {h}"
            )));
        }
        let eval = FrozenEvaluator::new(data, gamma, u.logs(), cfg, &PivotRule::FirstValid)?;
        Ok(Probe {
            eval,
            gamma: gamma.as_slice(),
            u: u.u(),
            h,
            cache: RefCell::new(HashMap::new()),
            shifted: RefCell::new(HashMap::new()),
        })
    }

    fn arg(&self, i: usize, k: i32) -> f64 {
        self.u[i] * (1.0 + f64::from(k) * self.h)
    }

    fn at(&self, k: &Offset) -> Result<Complex64> {
        if let Some(v) = self.cache.borrow().get(k) {
            return Ok(*v);
        }
        let y: Vec<f64> = (0..self.u.len()).map(|i| self.arg(i, k[i]).ln()).collect();
        let v = self.eval.phi(self.gamma, &y)?;
        self.cache.borrow_mut().insert(k.clone(), v);
        Ok(v)
    }

    fn base(&self) -> Result<Complex64> {
        self.at(&vec![0; self.u.len()])
    }

    /// `Phi_{gamma + e_i}(u)` on its own grid.
    fn raised(&self, i: usize) -> Result<Complex64> {
        if let Some(v) = self.shifted.borrow().get(&i) {
            return Ok(*v);
        }
        let mut g = self.gamma.to_vec();
        g[i] += 1.0;
        let y: Vec<f64> = self.u.iter().map(|x| x.ln()).collect();
        let v = self.eval.phi_replanned(&g, &y)?;
        self.shifted.borrow_mut().insert(i, v);
        Ok(v)
    }

    /// `Phi` with `gamma_i` moved by `delta`, on the frozen grid.
    fn gamma_moved(&self, i: usize, delta: f64) -> Result<Complex64> {
        let mut g = self.gamma.to_vec();
        g[i] += delta;
        let y: Vec<f64> = self.u.iter().map(|x| x.ln()).collect();
        self.eval.phi(&g, &y)
    }

    /// Applies `-d/du_i + gamma_i / u_i`.
    fn lower(&self, s: &Stencil, i: usize) -> Stencil {
        let delta = self.h * self.u[i];
        let mut out = Stencil::default();
        for (k, c) in &s.0 {
            let mut up = k.clone();
            up[i] += 1;
            let mut dn = k.clone();
            dn[i] -= 1;
            out.push(up, -c / (2.0 * delta));
            out.push(dn, c / (2.0 * delta));
            out.push(k.clone(), c * self.gamma[i] / self.arg(i, k[i]));
        }
        out
    }

    fn apply(&self, s: &Stencil) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &s.0 {
            acc += c * self.at(k)?;
        }
        Ok(acc)
    }

    /// `u_i dPhi/du_i` at the base point.
    fn euler(&self, i: usize) -> Result<Complex64> {
        let n = self.u.len();
        let mut up = vec![0; n];
        up[i] = 1;
        let mut dn = vec![0; n];
        dn[i] = -1;
        Ok((self.at(&up)? - self.at(&dn)?) / (2.0 * self.h))
    }
}

fn check_lattice_vector(data: &GkzData, l: &[i64]) -> Result<()> {
    if l.len() != data.n() {
        return Err(GkzError::Shape(format!(
            "l has length {}, expected {}",
            l.len(),
            data.n()
        )));
    }
    if !data.in_lattice(l) {
        return Err(GkzError::NotInLattice(l.to_vec()));
    }
    Ok(())
}

fn check_index(index: usize, bound: usize) -> Result<usize> {
    if index == 0 || index > bound {
        return Err(GkzError::IndexOutOfRange { index, bound });
    }
    Ok(index - 1)
}

fn lattice_pde_with(probe: &Probe, l: &[i64]) -> Result<ResidualReport> {
    let n = l.len();
    let mut lhs = Stencil::unit(n);
    let mut rhs = Stencil::unit(n);
    for (i, &li) in l.iter().enumerate() {
        for _ in 0..li.unsigned_abs() {
            if li < 0 {
                lhs = probe.lower(&lhs, i);
            } else {
                rhs = probe.lower(&rhs, i);
            }
        }
    }
    let a = probe.apply(&lhs)?;
    let b = probe.apply(&rhs)?;
    Ok(ResidualReport::new(
        EquationId::LatticePde,
        l.to_vec(),
        a - b,
        a.norm().max(b.norm()),
        probe.h,
    ))
}

fn torus_pde_with(probe: &Probe, a_row: &[i64], s: usize) -> Result<ResidualReport> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for (i, &a) in a_row.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let t = probe.euler(i)? * a as f64;
        total += t;
        scale = scale.max(t.norm());
    }
    Ok(ResidualReport::new(
        EquationId::TorusPde,
        vec![s as i64],
        total,
        scale,
        probe.h,
    ))
}

fn dual_difference_with(probe: &Probe, a_row: &[i64], s: usize) -> Result<ResidualReport> {
    let phi = probe.base()?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for (i, &a) in a_row.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let up = probe.raised(i)? * a as f64;
        let down = phi * probe.gamma[i] * a as f64;
        total += up - down;
        scale = scale.max(up.norm()).max(down.norm());
    }
    Ok(ResidualReport::new(
        EquationId::DualDifference,
        vec![s as i64],
        total,
        scale,
        0.0,
    ))
}

fn spectral_linear_with(probe: &Probe, l: &[i64]) -> Result<ResidualReport> {
    let phi = probe.base()?;
    let h = probe.h;
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for (i, &li) in l.iter().enumerate() {
        if li == 0 {
            continue;
        }
        let d = (probe.gamma_moved(i, h)? - probe.gamma_moved(i, -h)?) / (2.0 * h) * li as f64;
        let logu = phi * (li as f64 * probe.u[i].ln());
        total += d - logu;
        scale = scale.max(d.norm()).max(logu.norm());
    }
    Ok(ResidualReport::new(
        EquationId::SpectralLinear,
        l.to_vec(),
        total,
        scale,
        h,
    ))
}

fn contiguity_with(probe: &Probe, i: usize) -> Result<ResidualReport> {
    let d = probe.euler(i)?;
    let g = probe.base()? * probe.gamma[i];
    let up = probe.raised(i)?;
    let scale = d.norm().max(g.norm()).max(up.norm());
    Ok(ResidualReport::new(
        EquationId::Contiguity,
        vec![i as i64 + 1],
        -d + g - up,
        scale,
        probe.h,
    ))
}

/// `prod_{l_i<0} (-d_i + gamma_i/u_i)^{-l_i} Phi = prod_{l_i>0} (-d_i + gamma_i/u_i)^{l_i} Phi`.
pub fn residual_lattice_pde(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    l: &[i64],
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    check_lattice_vector(data, l)?;
    lattice_pde_with(&Probe::new(data, gamma, u, h, cfg)?, l)
}

/// `sum_i a^s_i u_i dPhi/du_i = 0` for the 1-based row `s` of `A`.
pub fn residual_torus_pde(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    s: usize,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let row = data.a_rows()[check_index(s, data.m())?].clone();
    torus_pde_with(&Probe::new(data, gamma, u, h, cfg)?, &row, s)
}

/// `sum_i a^s_i (Phi_{gamma + e_i} - gamma_i Phi_gamma) = 0`.
pub fn residual_dual_difference(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    s: usize,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let row = data.a_rows()[check_index(s, data.m())?].clone();
    dual_difference_with(&Probe::new(data, gamma, u, 1e-3, cfg)?, &row, s)
}

/// `sum_i l_i (d/dgamma_i - log u_i) Phi = 0`.
pub fn residual_spectral_linear(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    l: &[i64],
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    check_lattice_vector(data, l)?;
    spectral_linear_with(&Probe::new(data, gamma, u, h, cfg)?, l)
}

/// `(-u_i d/du_i + gamma_i) Phi_gamma = Phi_{gamma + e_i}` for 1-based `i`.
pub fn residual_contiguity(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    i: usize,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    let i0 = check_index(i, data.n())?;
    contiguity_with(&Probe::new(data, gamma, u, h, cfg)?, i0)
}

/// Every family at one base point: lattice and spectral equations for each
/// basis vector of the lattice, torus and difference equations for each row
/// of `A`, and the contiguity relation for each variable. One frozen grid
/// and one cache serve all of them.
pub fn verify_all(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<ResidualReport>> {
    let probe = Probe::new(data, gamma, u, h, cfg)?;
    let mut out = Vec::new();
    let lattice = data.lattice_rows();
    for l in &lattice {
        out.push(lattice_pde_with(&probe, l)?);
    }
    for (s, row) in data.a_rows().iter().enumerate() {
        out.push(torus_pde_with(&probe, row, s + 1)?);
    }
    for (s, row) in data.a_rows().iter().enumerate() {
        out.push(dual_difference_with(&probe, row, s + 1)?);
    }
    for l in &lattice {
        out.push(spectral_linear_with(&probe, l)?);
    }
    for i in 0..data.n() {
        out.push(contiguity_with(&probe, i)?);
    }
    Ok(out)
}

/// Residual of the reduced equation
/// `{prod_i (-d/dx + lambda_i) - e^x} Phi(x) = 0` for the maximal parabolic
/// Whittaker function of rank `lambda.len() - 1`, with step `h` in `x`.
pub fn residual_reduced_ode(
    lambda: &[Complex64],
    x: f64,
    h: f64,
    cfg: &QuadratureConfig,
) -> Result<ResidualReport> {
    if !(h > 0.0 && h < 0.5) {
        return Err(GkzError::Invalid(format!(
            "finite-difference step must lie in (0, 0.5), got {h}"
        )));
    }
    let data = build_max_parabolic_data(lambda.len().saturating_sub(1))?;
    let gamma = SpectralVector::new(lambda.to_vec());
    let base = max_parabolic_arguments(lambda.len() - 1, x)?;
    let eval = FrozenEvaluator::new(&data, &gamma, base.logs(), cfg, &PivotRule::FirstValid)?;
    let mut cache: HashMap<i32, Complex64> = HashMap::new();
    let mut value = |k: i32| -> Result<Complex64> {
        if let Some(v) = cache.get(&k) {
            return Ok(*v);
        }
        let y = max_parabolic_arguments(lambda.len() - 1, x + f64::from(k) * h)?;
        let v = eval.phi(lambda, y.logs())?;
        cache.insert(k, v);
        Ok(v)
    };
    let mut lhs: BTreeMap<i32, Complex64> = BTreeMap::new();
    lhs.insert(0, Complex64::new(1.0, 0.0));
    for lam in lambda {
        let mut next: BTreeMap<i32, Complex64> = BTreeMap::new();
        for (&k, c) in &lhs {
            *next.entry(k + 1).or_default() -= c / (2.0 * h);
            *next.entry(k - 1).or_default() += c / (2.0 * h);
            *next.entry(k).or_default() += c * lam;
        }
        lhs = next;
    }
    let mut left = Complex64::new(0.0, 0.0);
    for (&k, c) in &lhs {
        left += c * value(k)?;
    }
    let right = value(0)? * x.exp();
    let rank = lambda.len() as i64 - 1;
    Ok(ResidualReport::new(
        EquationId::ReducedOde,
        vec![rank],
        left - right,
        left.norm().max(right.norm()),
        h,
    ))
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
    fn exponential_lattice_pde() {
        let d = GkzData::without_torus(IntegerMatrix::new(&[vec![1]]).unwrap()).unwrap();
        let g = SpectralVector::from_real(&[0.7]);
        let u = ArgumentVector::new(vec![2.0]).unwrap();
        let r = residual_lattice_pde(&d, &g, &u, &[1], 1e-3, &cfg()).unwrap();
        assert!(r.relative_residual < 1e-6, "{r:?}");
        let r = residual_spectral_linear(&d, &g, &u, &[1], 1e-3, &cfg()).unwrap();
        assert!(r.relative_residual < 1e-7, "{r:?}");
    }

    #[test]
    fn gamma_torus_residual_vanishes() {
        let d = build_gkz_data(IntegerMatrix::new(&[vec![1]]).unwrap(), None).unwrap();
        let g = SpectralVector::from_real(&[2.5]);
        let u = ArgumentVector::new(vec![1.7]).unwrap();
        let r = residual_torus_pde(&d, &g, &u, 1, 1e-3, &cfg()).unwrap();
        assert_eq!(r.absolute_residual, 0.0);
        let r = residual_dual_difference(&d, &g, &u, 1, &cfg()).unwrap();
        assert!(r.relative_residual < 1e-10, "{r:?}");
    }

    #[test]
    fn rejects_bad_indices() {
        let d = build_gkz_data(IntegerMatrix::new(&[vec![1, 1]]).unwrap(), None).unwrap();
        let g = SpectralVector::from_real(&[1.0, 1.0]);
        let u = ArgumentVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            residual_torus_pde(&d, &g, &u, 2, 1e-3, &cfg()),
            Err(GkzError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            residual_lattice_pde(&d, &g, &u, &[1, 1], 1e-3, &cfg()),
            Err(GkzError::NotInLattice(_))
        ));
        assert!(residual_contiguity(&d, &g, &u, 0, 1e-3, &cfg()).is_err());
    }

    #[test]
    fn report_serialises_with_short_names() {
        let r = ResidualReport::new(
            EquationId::TorusPde,
            vec![1],
            Complex64::new(0.0, 0.0),
            0.0,
            1e-3,
        );
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["equation"], "torus_pde");
        assert_eq!(v["rel"], 0.0);
        assert!(v.get("abs").is_some());
    }
}
