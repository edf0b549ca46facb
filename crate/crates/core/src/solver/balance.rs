//! Balance configurations of two nodes on a rhombic torus, restricted to the
//! diagonal p2 = x(T1 + T2) = −x T3.

use num_complex::Complex64;
use serde::Serialize;

use super::roots::{brent, Tolerances};
use crate::error::{Error, Result};
use crate::special_fn::RhombicTorus;

/// Threshold on both partial derivatives in [`nondegeneracy_check`].
pub const NONDEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceConfig {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub residual: f64,
    pub nondegenerate: bool,
}

/// f(x, θ) = x η3 − ζ(x T3), real for real x.
pub fn balance_residual(x: f64, torus: &RhombicTorus) -> Result<f64> {
    Ok((x * torus.eta3 - torus.zeta(x * torus.t3)?).re)
}

/// ∂f/∂x = η3 + T3 ℘(x T3).
pub fn balance_slope(x: f64, torus: &RhombicTorus) -> Result<f64> {
    Ok((torus.eta3 + torus.t3 * torus.wp(x * torus.t3)?).re)
}

/// T3 ℘(T3/2) + η3: the slope at the 2-division point. It vanishes at θ*.
pub fn half_period_slope(theta: f64) -> Result<f64> {
    balance_slope(0.5, &RhombicTorus::new(theta)?)
}

/// Unique root x ∈ (0, 1/2) of f(·, θ) for 0 < θ < θ*.
///
/// f → +∞ at 0, f(1/2) = 0 with f′(1/2) > 0, and f is convex, so f has a
/// single interior minimum; the root lies left of it.
pub fn balance_solve(theta: f64) -> Result<BalanceConfig> {
    let torus = RhombicTorus::new(theta)?;
    let slope_half = balance_slope(0.5, &torus)?;
    if !(slope_half > 0.0) {
        return Err(Error::Domain {
            func: "balance_solve",
            msg: format!("theta = {theta} is not below theta* (slope at 1/2 is {slope_half:e})"),
        });
    }
    let tol = Tolerances { ftol: 1e-13, xtol: 1e-15, max_iter: 200 };
    let lo = 1e-6;
    let x_min = brent(|x| balance_slope(x, &torus), lo, 0.5, balance_slope(lo, &torus)?, slope_half, &tol)?.x;
    let f = |x| balance_residual(x, &torus);
    let root = brent(f, lo, x_min, f(lo)?, f(x_min)?, &tol)?;
    let mut cfg = BalanceConfig { x: root.x, y: root.x, theta, residual: root.fx.abs(), nondegenerate: false };
    cfg.nondegenerate = nondegeneracy_check(&cfg)?.nondegenerate;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondegeneracyReport {
    /// ∂F/∂x at y = 0, equal to −∂f/∂x.
    pub dfdx: f64,
    /// |∂F/∂y| at y = 0, |η1 − η2 + (T1 − T2) ℘(x T3)|.
    pub dfdy: f64,
    pub nondegenerate: bool,
}

/// Partial derivatives of F(x, y) = (x+y)η1 + (x−y)η2 − ζ((x+y)T1 + (x−y)T2)
/// at the configuration, from ℘ directly.
pub fn nondegeneracy_check(cfg: &BalanceConfig) -> Result<NondegeneracyReport> {
    let torus = RhombicTorus::new(cfg.theta)?;
    let wp: Complex64 = torus.wp(cfg.x * torus.t3)?;
    let dfdx = -(torus.eta3 + torus.t3 * wp).re;
    let dfdy = (torus.eta1 - torus.eta2 + (torus.t1 - torus.t2) * wp).norm();
    Ok(NondegeneracyReport { dfdx, dfdy, nondegenerate: dfdx.abs() > NONDEGENERACY_TOL && dfdy > NONDEGENERACY_TOL })
}

/// θ* ∈ (1, 1.5) where the trivial and non-trivial balance loci meet.
pub fn theta_star() -> Result<f64> {
    let tol = Tolerances { ftol: 1e-14, xtol: 1e-15, max_iter: 200 };
    let (a, b) = (1.0, 1.5);
    Ok(brent(half_period_slope, a, b, half_period_slope(a)?, half_period_slope(b)?, &tol)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sixty_degrees_gives_one_third() {
        let cfg = balance_solve(PI / 3.0).unwrap();
        assert!((cfg.x - 1.0 / 3.0).abs() < 1e-9, "{cfg:?}");
        assert!(cfg.residual < 1e-11 && cfg.nondegenerate);
    }

    #[test]
    fn two_division_point_is_always_balanced() {
        for theta in [0.6, 0.9, 1.2] {
            let t = RhombicTorus::new(theta).unwrap();
            assert!(balance_residual(0.5, &t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn theta_star_and_degeneracy() {
        let ts = theta_star().unwrap();
        assert!((ts - 1.23409).abs() < 1e-5 && (ts.to_degrees() - 70.7083).abs() < 1e-3);
        let cfg = BalanceConfig { x: 0.5, y: 0.5, theta: ts, residual: 0.0, nondegenerate: false };
        assert!(!nondegeneracy_check(&cfg).unwrap().nondegenerate);
        let cfg = BalanceConfig { x: 0.5, y: 0.5, theta: 1.0, residual: 0.0, nondegenerate: false };
        assert!(nondegeneracy_check(&cfg).unwrap().nondegenerate);
        let near = balance_solve(ts - 1e-3).unwrap();
        assert!((near.x - 0.5).abs() < 0.1);
        assert!(balance_solve(ts + 1e-3).is_err());
    }
}
