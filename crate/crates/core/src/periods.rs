//! Period integrals of the simplified forms and the period quotients built
//! from them.
//!
//! All lengths are taken at ρ = 1 over the ζ-intervals (−τ, −α), (−α, β) and
//! (β, τ), where the integrands are
//!
//! ```text
//! |φ1| = |ζ+α|^½ |ζ−β|^−½ |ζ²−τ²|^−½ (ζ²+4)^−½,   |φ2| = |ζ+α|^−½ |ζ−β|^½ |ζ²−τ²|^−½ (ζ²+4)^−½
//! ```

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{geometric_breaks, tanh_sinh_split, QuadratureSpec};
use crate::special_fn::{ell_d, ell_e, ell_k, ell_pi};
use crate::weierstrass_data::SimplifiedParams;

/// Below this |β − α| (resp. |α + β|) the quotient queries switch to the
/// closed forms.
pub const DEGENERATE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodSet {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
}

impl PeriodSet {
    pub fn q_i(&self) -> f64 {
        (self.i1 + self.i3) / self.i2
    }

    pub fn q_j(&self) -> f64 {
        (self.j1 + self.j3) / self.j2
    }

    pub fn q(&self) -> f64 {
        self.q_i() - self.q_j()
    }

    /// ρ making I2·ρ = J2/ρ.
    pub fn rho(&self) -> f64 {
        (self.j2 / self.i2).sqrt()
    }

    /// Residuals of the two period conditions after scaling φ1 by ρ and φ2 by 1/ρ.
    pub fn closing_residuals(&self, rho: f64) -> (f64, f64) {
        ((self.i1 + self.i3) * rho - (self.j1 + self.j3) / rho, self.i2 * rho - self.j2 / rho)
    }
}

/// |φ1| and |φ2| (at ρ = 1) from the distances to the relevant points.
#[inline]
fn pair(d_alpha: f64, d_beta: f64, d_mtau: f64, d_tau: f64, zeta: f64) -> [f64; 2] {
    let common = 1.0 / (d_mtau * d_tau * (zeta * zeta + 4.0)).sqrt();
    let r = (d_alpha / d_beta).sqrt();
    [r * common, common / r]
}

/// Breakpoints of an interval [p, q]: geometric refinement toward each end
/// whose nearest singularity beyond the end lies at distance `near_l` / `near_r`.
fn interval_breaks(p: f64, q: f64, near_l: f64, near_r: f64) -> Vec<f64> {
    let len = q - p;
    let cap = |x: f64, d: f64| d.min((x * x + 4.0).sqrt());
    let mut out: Vec<f64> = geometric_breaks(cap(p, near_l), len).into_iter().map(|d| p + d).collect();
    out.extend(geometric_breaks(cap(q, near_r), len).into_iter().map(|d| q - d));
    out
}

/// The six edge lengths at ρ = 1.
pub fn periods(s: &SimplifiedParams, spec: &QuadratureSpec) -> Result<PeriodSet> {
    s.validate()?;
    let SimplifiedParams { alpha, beta, tau } = *s;
    let ab = alpha + beta;
    if ab < 1e-12 {
        return Err(Error::Degenerate(format!("middle interval has length {ab:e}")));
    }
    // lengths scale like 1/τ for large τ; keep the relative accuracy
    let spec = QuadratureSpec { target_abs_tol: spec.target_abs_tol / (1.0 + tau), ..*spec };

    // (−τ, −α): dl = ζ + τ, dr = −α − ζ
    let f1 = |_: f64, dl: f64, dr: f64| {
        let zeta = if dl < dr { -tau + dl } else { -alpha - dr };
        pair(dr, ab + dr, dl, tau + alpha + dr, zeta)
    };
    let b1 = interval_breaks(-tau, -alpha, f64::INFINITY, ab);
    let r1 = tanh_sinh_split(f1, -tau, -alpha, &b1, &spec)?;

    // (−α, β): dl = ζ + α, dr = β − ζ
    let f2 = |_: f64, dl: f64, dr: f64| {
        let zeta = if dl < dr { -alpha + dl } else { beta - dr };
        pair(dl, dr, tau - alpha + dl, tau - beta + dr, zeta)
    };
    let b2 = interval_breaks(-alpha, beta, tau - alpha, tau - beta);
    let r2 = tanh_sinh_split(f2, -alpha, beta, &b2, &spec)?;

    // (β, τ): dl = ζ − β, dr = τ − ζ
    let f3 = |_: f64, dl: f64, dr: f64| {
        let zeta = if dl < dr { beta + dl } else { tau - dr };
        pair(ab + dl, dl, tau + beta + dl, dr, zeta)
    };
    let b3 = interval_breaks(beta, tau, ab, f64::INFINITY);
    let r3 = tanh_sinh_split(f3, beta, tau, &b3, &spec)?;

    Ok(PeriodSet {
        i1: r1.value[0],
        i2: r2.value[0],
        i3: r3.value[0],
        j1: r1.value[1],
        j2: r2.value[1],
        j3: r3.value[1],
    })
}

/// Q = (I1+I3)/I2 − (J1+J3)/J2.
pub fn q(s: &SimplifiedParams) -> Result<f64> {
    Ok(periods(s, &QuadratureSpec::default())?.q())
}

/// (Q_I, Q_J).
pub fn q_parts(s: &SimplifiedParams) -> Result<(f64, f64)> {
    let p = periods(s, &QuadratureSpec::default())?;
    Ok((p.q_i(), p.q_j()))
}

/// ρ = √(J2/I2), balancing the second period condition.
pub fn solve_rho(s: &SimplifiedParams) -> Result<f64> {
    Ok(periods(s, &QuadratureSpec::default())?.rho())
}

fn check_open(func: &'static str, lo: f64, x: f64, tau: f64) -> Result<()> {
    if !(x > lo && x < tau && tau.is_finite()) {
        return Err(Error::Domain { func, msg: format!("need {lo} < {x} < tau = {tau}") });
    }
    Ok(())
}

/// Pieces of the diagonal closed form:
/// (Ē(m1)K(m2) − K̄(m1)D(m2), K̄(m1), K(m2)), with D = (K − E)/m.
fn diagonal_parts(alpha: f64, tau: f64) -> Result<(f64, f64, f64)> {
    let (a2, t2) = (alpha * alpha, tau * tau);
    // 1 − m1 formed directly, K̄(m1) = K(1 − m1)
    let m1c = (t2 - a2) / (t2 + 4.0);
    let m2 = a2 * (t2 + 4.0) / (t2 * (a2 + 4.0));
    let kbar1 = ell_k(m1c)?;
    let ebar1 = ell_e(m1c)?;
    let k2 = ell_k(m2)?;
    let d2 = ell_d(m2)?;
    Ok((ebar1 * k2 - kbar1 * d2, kbar1, k2))
}

/// Analytic continuation of Q/(β − α) to α = β.
///
/// Equivalent to −τ³/(α²(τ²−α²)) √((α²+4)/(τ²+4)) · (K̄1E2 + m2Ē1K2 − K̄1K2)/K2²,
/// rewritten with D(m2) so that no cancellation occurs as α → 0.
pub fn qtilde_closed(alpha: f64, tau: f64) -> Result<f64> {
    check_open("qtilde_closed", 0.0, alpha, tau)?;
    let (num, _, k2) = diagonal_parts(alpha, tau)?;
    let (a2, t2) = (alpha * alpha, tau * tau);
    Ok(-tau / (t2 - a2) * ((t2 + 4.0) / (a2 + 4.0)).sqrt() * num / (k2 * k2))
}

/// Residual of the intersection equation K̄(m1)E(m2) + m2Ē(m1)K(m2) = K̄(m1)K(m2),
/// divided by m2 K̄(m1) K(m2). It has the sign of −Q̃ and tends to
/// E(m)/K(m) − 1/2 as α → 0.
pub fn intersection_residual(alpha: f64, tau: f64) -> Result<f64> {
    check_open("intersection_residual", 0.0, alpha, tau)?;
    let (num, kbar1, k2) = diagonal_parts(alpha, tau)?;
    Ok(num / (kbar1 * k2))
}

/// Modulus and characteristics of the Traizet equation: (m, n, n′, n″).
fn traizet_params(beta: f64, tau: f64) -> (f64, f64, f64, f64) {
    let (b2, t2) = (beta * beta, tau * tau);
    (t2 / (t2 + 4.0), t2 / (t2 - b2), (t2 - b2) / (t2 + 4.0), b2 / (b2 + 4.0))
}

/// N = (2β²−τ²+4)K(m) − 2(β²+4)Π(n,m), evaluated through the n′ form
/// N = 2(β²+4)Π(n′,m) − (τ²+4)K(m) which keeps the characteristic in (0, m).
fn traizet_numerator(beta: f64, tau: f64) -> Result<(f64, f64)> {
    let (m, _, n1, _) = traizet_params(beta, tau);
    let k = ell_k(m)?;
    let b4 = beta * beta + 4.0;
    Ok((2.0 * b4 * ell_pi(n1, m)? - (tau * tau + 4.0) * k, k))
}

/// Limit of (1/Q_I − 1/Q_J)/(α+β)² as α → −β.
pub fn qhat_closed(beta: f64, tau: f64) -> Result<f64> {
    check_open("qhat_closed", -f64::MIN_POSITIVE, beta, tau)?;
    let (n, k) = traizet_numerator(beta, tau)?;
    let (b2, t2) = (beta * beta, tau * tau);
    let c = PI * beta * (t2 + 4.0).sqrt() / (8.0 * (b2 + 4.0).powf(1.5) * (t2 - b2).powf(1.5));
    Ok(c * n / (k * k))
}

/// N/((τ²+4)K(m)): zero on the Traizet locus, → 1 as τ → β+.
pub fn traizet_residual(beta: f64, tau: f64) -> Result<f64> {
    check_open("traizet_residual", -f64::MIN_POSITIVE, beta, tau)?;
    let (n, k) = traizet_numerator(beta, tau)?;
    Ok(n / ((tau * tau + 4.0) * k))
}

/// The three equivalent forms of the Traizet equation (characteristics n,
/// n′, n″), each divided by its factor relative to N and by (τ²+4)K(m).
/// The first uses the principal value Π(n, m) with n > 1.
pub fn traizet_forms(beta: f64, tau: f64) -> Result<[f64; 3]> {
    check_open("traizet_forms", 0.0, beta, tau)?;
    let (m, n, n1, n2) = traizet_params(beta, tau);
    let (b2, t2) = (beta * beta, tau * tau);
    let b4 = b2 + 4.0;
    let k = ell_k(m)?;
    let norm = (t2 + 4.0) * k;
    let f_n = (2.0 * b2 - t2 + 4.0) * k - 2.0 * b4 * ell_pi(n, m)?;
    let f_n1 = (t2 + 4.0) * k - 2.0 * b4 * ell_pi(n1, m)?;
    let r = t2 / n2;
    let f_n2 = (8.0 * r + (t2 - 4.0) * b4) * k - 8.0 * (r - b4) * ell_pi(n2, m)?;
    Ok([f_n / norm, -f_n1 / norm, f_n2 / (b4 * norm)])
}

/// Q/(β − α), switching to the closed form within the degenerate guard.
pub fn qtilde(s: &SimplifiedParams) -> Result<f64> {
    let gap = s.beta - s.alpha;
    if gap.abs() < DEGENERATE_GUARD {
        return qtilde_closed(0.5 * (s.alpha + s.beta), s.tau);
    }
    Ok(q(s)? / gap)
}

/// (1/Q_I − 1/Q_J)/(α + β)², switching to the closed form within the guard.
pub fn qhat(s: &SimplifiedParams) -> Result<f64> {
    let sum = s.alpha + s.beta;
    if sum.abs() < DEGENERATE_GUARD {
        return qhat_closed(s.beta, s.tau);
    }
    let (qi, qj) = q_parts(s)?;
    Ok((1.0 / qi - 1.0 / qj) / (sum * sum))
}
