//! Reference values computed independently of the library's quadrature.

#![allow(dead_code)]

use gkz_core::eval::{Evaluation, QuadratureConfig};
use num_complex::Complex64;

/// `Gamma(x) = int_R exp(x s - e^s) ds` for real `x > 0`, by a fine
/// trapezoid rule on a fixed window.
pub fn gamma_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let lo = -(40.0 / x) - 2.0;
    let hi = 5.0 + x.ln().max(0.0) * 2.0;
    let steps = 200_000usize;
    let h = (hi - lo) / steps as f64;
    let f = |s: f64| (x * s - s.exp()).exp();
    let mut acc = 0.5 * (f(lo) + f(hi));
    for k in 1..steps {
        acc += f(lo + k as f64 * h);
    }
    acc * h
}

/// `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt` for real `nu`.
pub fn bessel_k_reference(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0);
    let f =
        |t: f64| (-z * t.cosh() + nu.abs() * t).exp() * 0.5 * (1.0 + (-2.0 * nu.abs() * t).exp());
    let h = 2e-3;
    let mut acc = 0.5 * f(0.0);
    let peak = f((nu.abs() / z).asinh()).max(f(0.0));
    let mut k = 1usize;
    loop {
        let v = f(k as f64 * h);
        acc += v;
        if v < 1e-20 * peak && (k as f64 * h) > (nu.abs() / z).asinh() {
            break;
        }
        k += 1;
    }
    acc * h
}

/// `2 e^{s (l1 + l2) / 2} K_{l1 - l2}(2 e^{d / 2})`, the rank-one Whittaker
/// function with sum variable `s` and difference variable `d`.
pub fn rank_one_whittaker(l1: f64, l2: f64, s: f64, d: f64) -> f64 {
    2.0 * (s * (l1 + l2) / 2.0).exp() * bessel_k_reference(l1 - l2, 2.0 * (d / 2.0).exp())
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn with_points(points: usize) -> QuadratureConfig {
    QuadratureConfig {
        points_per_dim: points,
        ..QuadratureConfig::default()
    }
}

/// Error-estimate reduction from doubling the base grid, with the pair of
/// estimates. Estimates already at the rounding floor count as converged.
pub fn doubling_gain(coarse: &Evaluation, fine: &Evaluation) -> (f64, bool) {
    let floor = 64.0 * f64::EPSILON * fine.value.norm().max(f64::MIN_POSITIVE);
    let ratio = if fine.err == 0.0 {
        f64::INFINITY
    } else {
        coarse.err / fine.err
    };
    (
        ratio,
        ratio >= 10.0 || (coarse.err <= floor && fine.err <= floor),
    )
}
