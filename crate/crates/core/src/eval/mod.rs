//! Numerical evaluation of the Gelfand–Graev integral
//!
//! `Phi_gamma(u) = int_{R^N} dT exp(gamma . T - sum_i e^{T_i})
//!                 prod_alpha delta(l^alpha . (T - y))`,  `y = log u`,
//!
//! and of the normalised GKZ solution `f_gamma(u) = prod_i u_i^{-gamma_i} Phi_gamma(u)`.

mod chamber;
mod quad;
mod reduce;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GkzError, Result};
use crate::model::{ArgumentVector, GkzData, SpectralVector};

pub use quad::GridPlan;
pub(crate) use quad::LogIntegrand;
pub use reduce::{valid_pivot_sets, PivotRule, ReducedIntegral};

/// Quadrature parameters.
///
/// `max_halfwidth` bounds each half-axis of the sampling box, measured in
/// coordinates whitened by the Hessian at the Laplace mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub points_per_dim: usize,
    pub tail_tolerance: f64,
    pub max_halfwidth: f64,
    pub refinement: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            points_per_dim: 96,
            tail_tolerance: 1e-14,
            max_halfwidth: 60.0,
            refinement: 1,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_dim < 2 {
            return Err(GkzError::Invalid(
                "points_per_dim must be at least 2".into(),
            ));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(GkzError::Invalid(
                "tail_tolerance must lie in (0, 1)".into(),
            ));
        }
        if !(self.max_halfwidth > 0.0 && self.max_halfwidth.is_finite()) {
            return Err(GkzError::Invalid("max_halfwidth must be positive".into()));
        }
        if self.refinement == 0 {
            return Err(GkzError::Invalid("refinement must be at least 1".into()));
        }
        Ok(())
    }

    /// Points per axis at refinement level `level` (nested doubling).
    pub fn points_at(&self, level: u32) -> usize {
        (self.points_per_dim - 1) * (1usize << level) + 1
    }

    /// Points per axis of the finest level.
    pub fn finest_points(&self) -> usize {
        self.points_at(self.refinement)
    }
}

/// Quadrature result with an error estimate from the last refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub err: f64,
}

fn check_lengths(data: &GkzData, gamma: &SpectralVector, y: &[f64]) -> Result<()> {
    let n = data.n();
    if gamma.len() != n {
        return Err(GkzError::Shape(format!(
            "gamma has length {}, expected {n}",
            gamma.len()
        )));
    }
    if y.len() != n {
        return Err(GkzError::Shape(format!(
            "u has length {}, expected {n}",
            y.len()
        )));
    }
    Ok(())
}

/// Maximiser `s*` of `Re(gamma) . T(s) - sum_i e^{T_i(s)}` over the free
/// coordinates.
pub fn find_laplace_mode(reduced: &ReducedIntegral, gamma: &SpectralVector) -> Result<Vec<f64>> {
    if gamma.len() != reduced.n() {
        return Err(GkzError::Shape(format!(
            "gamma has length {}, expected {}",
            gamma.len(),
            reduced.n()
        )));
    }
    if reduced.free_dim() == 0 {
        return Err(GkzError::Invalid(
            "no free coordinates; the integral is a point evaluation".into(),
        ));
    }
    let f = LogIntegrand::new(reduced, gamma.as_slice(), None);
    f.check_chamber(reduced)?;
    f.find_mode()
}

/// Integral of `scale * exp(alpha . T - sum e^{T_i + shift_i})` over the
/// subspace of `reduced`, refined `cfg.refinement` times.
pub(crate) fn integrate(
    reduced: &ReducedIntegral,
    alpha: &[Complex64],
    shift: Option<&[f64]>,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    cfg.validate()?;
    let f = LogIntegrand::new(reduced, alpha, shift);
    f.check_chamber(reduced)?;
    if f.dim() == 0 {
        return Ok(Evaluation {
            value: f.point_value(),
            err: 0.0,
        });
    }
    let plan = GridPlan::build(&f, cfg)?;
    let coarse = plan.integrate(&f, cfg.points_at(cfg.refinement - 1));
    let fine = plan.integrate(&f, cfg.finest_points());
    if !(fine.re.is_finite() && fine.im.is_finite()) {
        return Err(GkzError::Internal("non-finite quadrature value".into()));
    }
    Ok(Evaluation {
        value: fine,
        err: (fine - coarse).norm(),
    })
}

/// `Phi_gamma(u)` with the default pivot rule.
pub fn evaluate_gg(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    evaluate_gg_with(data, gamma, u, cfg, &PivotRule::FirstValid)
}

pub fn evaluate_gg_with(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    cfg: &QuadratureConfig,
    rule: &PivotRule,
) -> Result<Evaluation> {
    check_lengths(data, gamma, u.logs())?;
    let reduced = ReducedIntegral::with_rule(data, u.logs(), rule)?;
    integrate(&reduced, gamma.as_slice(), None, cfg)
}

/// `f_gamma(u) = prod_i u_i^{-gamma_i} Phi_gamma(u)`.
pub fn evaluate_gkz(
    data: &GkzData,
    gamma: &SpectralVector,
    u: &ArgumentVector,
    cfg: &QuadratureConfig,
) -> Result<Evaluation> {
    let e = evaluate_gg(data, gamma, u, cfg)?;
    let pre = power_prefactor(gamma.as_slice(), u.logs());
    Ok(Evaluation {
        value: e.value * pre,
        err: e.err * pre.norm(),
    })
}

/// `prod_i u_i^{-gamma_i}` from `y = log u`.
pub fn power_prefactor(gamma: &[Complex64], y: &[f64]) -> Complex64 {
    let e: Complex64 = gamma.iter().zip(y).map(|(g, yi)| -g * yi).sum();
    e.exp()
}

/// `Phi` with the quadrature grid frozen at a base point.
///
/// Nearby `(gamma, y)` reuse the same nodes, so the result is a smooth
/// function of the parameters and finite differences of it are not polluted
/// by grid changes.
#[derive(Debug, Clone)]
pub struct FrozenEvaluator {
    reduced: ReducedIntegral,
    integrand: LogIntegrand,
    plan: Option<GridPlan>,
    points: usize,
    cfg: QuadratureConfig,
}

impl FrozenEvaluator {
    pub fn new(
        data: &GkzData,
        gamma: &SpectralVector,
        y: &[f64],
        cfg: &QuadratureConfig,
        rule: &PivotRule,
    ) -> Result<Self> {
        cfg.validate()?;
        check_lengths(data, gamma, y)?;
        let reduced = ReducedIntegral::with_rule(data, y, rule)?;
        let integrand = LogIntegrand::new(&reduced, gamma.as_slice(), None);
        integrand.check_chamber(&reduced)?;
        let plan = if integrand.dim() == 0 {
            None
        } else {
            Some(GridPlan::build(&integrand, cfg)?)
        };
        Ok(FrozenEvaluator {
            reduced,
            integrand,
            plan,
            points: cfg.finest_points(),
            cfg: cfg.clone(),
        })
    }

    pub fn reduced(&self) -> &ReducedIntegral {
        &self.reduced
    }

    /// `Phi_gamma(e^y)` on the frozen grid.
    pub fn phi(&self, gamma: &[Complex64], y: &[f64]) -> Result<Complex64> {
        let reduced = self.reduced.with_arguments(y)?;
        let f = self.integrand.with(&reduced, gamma);
        f.check_chamber(&reduced)?;
        Ok(match &self.plan {
            None => f.point_value(),
            Some(plan) => plan.integrate(&f, self.points),
        })
    }

    /// `Phi_gamma(e^y)` on a grid built for `gamma` itself, same pivots.
    pub fn phi_replanned(&self, gamma: &[Complex64], y: &[f64]) -> Result<Complex64> {
        let reduced = self.reduced.with_arguments(y)?;
        let f = self.integrand.with(&reduced, gamma);
        f.check_chamber(&reduced)?;
        if f.dim() == 0 {
            return Ok(f.point_value());
        }
        let plan = GridPlan::build(&f, &self.cfg)?;
        Ok(plan.integrate(&f, self.points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntegerMatrix;
    use crate::model::build_gkz_data;

    fn data(a: &[Vec<i64>]) -> GkzData {
        build_gkz_data(IntegerMatrix::new(a).unwrap(), None).unwrap()
    }

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn gamma_two_is_one() {
        let d = data(&[vec![1]]);
        let g = SpectralVector::from_real(&[2.0]);
        let u = ArgumentVector::new(vec![1.0]).unwrap();
        let e = evaluate_gg(&d, &g, &u, &QuadratureConfig::default()).unwrap();
        assert!((e.value - real(1.0)).norm() < 1e-12, "{:?}", e);
        assert!(e.err < 1e-10);
    }

    #[test]
    fn gamma_value_is_independent_of_u() {
        let d = data(&[vec![1]]);
        let g = SpectralVector::from_real(&[3.0]);
        let u = ArgumentVector::new(vec![7.5]).unwrap();
        let e = evaluate_gg(&d, &g, &u, &QuadratureConfig::default()).unwrap();
        assert!((e.value - real(2.0)).norm() < 1e-11);
    }

    #[test]
    fn exponential_point_evaluation() {
        let d = GkzData::without_torus(IntegerMatrix::new(&[vec![1]]).unwrap()).unwrap();
        let g = SpectralVector::from_real(&[0.7]);
        let u = ArgumentVector::new(vec![2.0]).unwrap();
        let e = evaluate_gg(&d, &g, &u, &QuadratureConfig::default()).unwrap();
        let expected = 2f64.powf(0.7) * (-2f64).exp();
        assert!((e.value - real(expected)).norm() < 1e-15);
        assert_eq!(e.err, 0.0);
    }

    #[test]
    fn laplace_mode_of_gamma_integrand() {
        // exp(gamma T - e^T) peaks at T = log gamma.
        let d = data(&[vec![1]]);
        let r = ReducedIntegral::new(&d, &[0.0]).unwrap();
        let s = find_laplace_mode(&r, &SpectralVector::from_real(&[2.0])).unwrap();
        assert!((s[0] - 2f64.ln()).abs() < 1e-12);
        let s = find_laplace_mode(&r, &SpectralVector::from_real(&[1.0])).unwrap();
        assert!(s[0].abs() < 1e-12);
    }

    #[test]
    fn chamber_violations_are_domain_errors() {
        let d = data(&[vec![1]]);
        let u = ArgumentVector::new(vec![1.0]).unwrap();
        let cfg = QuadratureConfig::default();
        for g in [-0.5, 0.0] {
            let err = evaluate_gg(&d, &SpectralVector::from_real(&[g]), &u, &cfg).unwrap_err();
            assert!(err.is_domain(), "{err}");
        }
    }

    #[test]
    fn config_validation() {
        let mut c = QuadratureConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.finest_points(), 191);
        c.refinement = 0;
        assert!(c.validate().is_err());
        let c = QuadratureConfig {
            points_per_dim: 1,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn box_growth_is_reported() {
        let d = data(&[vec![1]]);
        let u = ArgumentVector::new(vec![1.0]).unwrap();
        let cfg = QuadratureConfig {
            max_halfwidth: 2.0,
            ..Default::default()
        };
        let err = evaluate_gg(&d, &SpectralVector::from_real(&[0.5]), &u, &cfg).unwrap_err();
        assert!(matches!(err, GkzError::BoxGrowth { .. }));
    }

    #[test]
    fn frozen_evaluator_matches_direct() {
        let d = data(&[vec![1, 1]]);
        let g = SpectralVector::from_real(&[1.3, 0.9]);
        let y = [0.4, -0.2];
        let cfg = QuadratureConfig::default();
        let fr = FrozenEvaluator::new(&d, &g, &y, &cfg, &PivotRule::FirstValid).unwrap();
        let direct = evaluate_gg(
            &d,
            &g,
            &ArgumentVector::from_logs(y.to_vec()).unwrap(),
            &cfg,
        )
        .unwrap();
        let frozen = fr.phi(g.as_slice(), &y).unwrap();
        assert!((direct.value - frozen).norm() < 1e-14 * frozen.norm());
    }
}
