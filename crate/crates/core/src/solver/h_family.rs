//! Explicit parameters of the Schwarz H surfaces within the oH
//! parametrization, and the t-range on which they are admissible.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::periods::periods;
use crate::quadrature::QuadratureSpec;
use crate::weierstrass_data::{simplify, SurfaceParams};

/// t⁴ − 60t² + 134 − 60t⁻² + t⁻⁴ = u² − 60u + 132 with u = t² + t⁻².
pub fn radicand(t: f64) -> f64 {
    let u = t * t + 1.0 / (t * t);
    u * u - 60.0 * u + 132.0
}

/// (a(t), b(t)) from the closed-form expressions.
pub fn h_params(t: f64) -> Result<(f64, f64)> {
    let rad = radicand(t);
    if !(rad >= 0.0) {
        return Err(Error::Domain { func: "h_params", msg: format!("radicand {rad:e} < 0 at t = {t}") });
    }
    let ti = 1.0 / t;
    let num = t.powi(3) - 15.0 * t + 15.0 * ti - ti.powi(3) + (t + ti) * rad.sqrt();
    let a = num / (2.0 * (7.0 * t * t - 10.0 - ti * ti));
    let b = num / (2.0 * (t * t + 10.0 - 7.0 * ti * ti));
    Ok((a, b))
}

fn ordered(t: f64) -> bool {
    matches!(h_params(t), Ok((a, b)) if SurfaceParams::new(a, b, t, 1.0).is_ok())
}

/// t > 1 with t² + t⁻² = u.
fn t_of_u(u: f64) -> f64 {
    (0.5 * (u + (u * u - 4.0).sqrt())).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HBranch {
    pub t_min: f64,
    pub t_max: f64,
}

/// The t-interval(s) on which the radicand is non-negative and the ordering
/// 1/t < 1/a < b < t holds, found by sampling each radicand branch.
pub fn h_family_valid_branch() -> Vec<HBranch> {
    // roots of u² − 60u + 132
    let disc = (900.0f64 - 132.0).sqrt();
    let (u_lo, u_hi) = (30.0 - disc, 30.0 + disc);
    let candidates =
        [HBranch { t_min: 1.0, t_max: t_of_u(u_lo) }, HBranch { t_min: t_of_u(u_hi), t_max: f64::INFINITY }];
    candidates
        .into_iter()
        .filter(|br| {
            let hi = if br.t_max.is_finite() { br.t_max } else { 100.0 * br.t_min };
            (1..=20).all(|k| {
                let s = k as f64 / 21.0;
                let t = br.t_min * (hi / br.t_min).powf(s);
                t > 1.0 && ordered(t)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HFamilyPoint {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub rho: f64,
    pub q: f64,
    /// |ρ²(τ+α)/(τ−β) − 1|
    pub cond_plus: f64,
    /// |ρ²(τ−α)/(τ+β) − 1|
    pub cond_minus: f64,
}

impl HFamilyPoint {
    pub fn min_condition(&self) -> f64 {
        self.cond_plus.min(self.cond_minus)
    }
}

pub fn h_family(t: f64) -> Result<HFamilyPoint> {
    let (a, b) = h_params(t)?;
    let p = SurfaceParams::new(a, b, t, 1.0)?;
    let s = simplify(&p)?;
    let per = periods(&s, &QuadratureSpec::default())?;
    let rho = per.rho();
    let r2 = rho * rho;
    Ok(HFamilyPoint {
        t,
        a,
        b,
        rho,
        q: per.q(),
        cond_plus: (r2 * (s.tau + s.alpha) / (s.tau - s.beta) - 1.0).abs(),
        cond_minus: (r2 * (s.tau - s.alpha) / (s.tau + s.beta) - 1.0).abs(),
    })
}
