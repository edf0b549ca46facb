//! Parameters and Weierstrass data of the octagon: the forms φ1, φ2, dh on
//! the upper half plane, their simplified versions in ζ = z − 1/z, and the
//! Gauss map.
//!
//! Every factor (z − v)^(±1/2) uses the branch with arg(z − v) in [0, π], so
//! the forms are single valued and holomorphic on the upper half plane and
//! extend continuously to the real axis away from the branch points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum distance from a branch point for pointwise evaluation.
pub const BRANCH_EXCLUSION: f64 = 1e-10;
/// Tolerance of the two residuals in [`antipodal_check`].
pub const ANTIPODAL_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceParams {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedParams {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
}

/// Half-exponents of the eight factors (z − v_k), in the order of
/// [`SurfaceParams::branch_points`].
pub(crate) const EXP_DH: [i8; 8] = [-1, 0, 0, -1, -1, 0, 0, -1];
pub(crate) const EXP_PHI1: [i8; 8] = [-1, 1, -1, -1, -1, 1, -1, -1];
pub(crate) const EXP_PHI2: [i8; 8] = [-1, -1, 1, -1, -1, -1, 1, -1];
pub(crate) const EXP_G: [i8; 8] = [0, 1, -1, 0, 0, 1, -1, 0];

impl SurfaceParams {
    pub fn new(a: f64, b: f64, t: f64, rho: f64) -> Result<Self> {
        let p = Self { a, b, t, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, t, rho } = *self;
        if !(t > 1.0) {
            return Err(Error::Ordering(format!("t = {t} must exceed 1")));
        }
        if !(a > 0.0 && 1.0 / t < 1.0 / a && 1.0 / a < b && b < t) {
            return Err(Error::Ordering(format!("need 1/t < 1/a < b < t, got a = {a}, b = {b}, t = {t}")));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Ordering(format!("rho = {rho} must be positive")));
        }
        Ok(())
    }

    /// v1..v8 = −t, −a, −1/b, −1/t, 1/t, 1/a, b, t.
    pub fn branch_points(&self) -> [f64; 8] {
        let Self { a, b, t, .. } = *self;
        [-t, -a, -1.0 / b, -1.0 / t, 1.0 / t, 1.0 / a, b, t]
    }
}

impl SimplifiedParams {
    pub fn new(alpha: f64, beta: f64, tau: f64) -> Result<Self> {
        let s = Self { alpha, beta, tau };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { alpha, beta, tau } = *self;
        if !(tau > 0.0 && -tau < -alpha && -alpha < beta && beta < tau) {
            return Err(Error::Ordering(format!(
                "need -tau < -alpha < beta < tau, got alpha = {alpha}, beta = {beta}, tau = {tau}"
            )));
        }
        Ok(())
    }

    /// The same surface with α and β exchanged (reflection ζ → −ζ).
    pub fn mirrored(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha, tau: self.tau }
    }
}

fn zeta_of(x: f64) -> f64 {
    x - 1.0 / x
}

/// Positive root z of z − 1/z = ζ, without cancellation for ζ < 0.
pub fn z_of(zeta: f64) -> f64 {
    let r = (zeta * zeta + 4.0).sqrt();
    if zeta >= 0.0 {
        0.5 * (zeta + r)
    } else {
        2.0 / (r - zeta)
    }
}

pub fn simplify(p: &SurfaceParams) -> Result<SimplifiedParams> {
    p.validate()?;
    let s = SimplifiedParams { alpha: zeta_of(p.a), beta: zeta_of(p.b), tau: zeta_of(p.t) };
    s.validate()?;
    Ok(s)
}

pub fn unsimplify(s: &SimplifiedParams, rho: f64) -> Result<SurfaceParams> {
    s.validate()?;
    SurfaceParams::new(z_of(s.alpha), z_of(s.beta), z_of(s.tau), rho)
}

/// Integrand values of ω1 = (φ2 − φ1)/2, ω2 = i(φ2 + φ1)/2 and ω3 = dh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormVector {
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub omega3: Complex64,
    pub phi1: Complex64,
    pub phi2: Complex64,
}

impl FormVector {
    pub fn from_phi(phi1: Complex64, phi2: Complex64, dh: Complex64) -> Self {
        Self { omega1: 0.5 * (phi2 - phi1), omega2: 0.5 * I * (phi2 + phi1), omega3: dh, phi1, phi2 }
    }

    pub fn null_residual(&self) -> f64 {
        (self.omega1 * self.omega1 + self.omega2 * self.omega2 + self.omega3 * self.omega3).norm()
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.omega1, self.omega2, self.omega3]
    }
}

/// arg(n/d) brought into [0, π]. The true value always lies in that range
/// for points of the closed upper half plane; rounding may push it slightly
/// outside.
pub(crate) fn half_plane_arg(n: Complex64, d_arg: f64) -> f64 {
    let mut th = n.arg() - d_arg;
    while th <= -0.5 * PI {
        th += 2.0 * PI;
    }
    while th > 1.5 * PI {
        th -= 2.0 * PI;
    }
    th.clamp(0.0, PI)
}

/// Π_k (n_k/d)^(e_k/2) · |d|^(Σe_k/2), each factor on the half-plane branch.
/// Leaving out the magnitude of d makes d = 0 harmless; callers supply the
/// remaining power of d (the Jacobian of the disk map cancels it exactly).
pub(crate) fn branch_product(n: &[Complex64; 8], d_arg: f64, exps: &[i8; 8]) -> Complex64 {
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for k in 0..8 {
        let e = exps[k];
        if e == 0 {
            continue;
        }
        log_mag += 0.5 * e as f64 * n[k].norm().ln();
        phase += 0.5 * e as f64 * half_plane_arg(n[k], d_arg);
    }
    if log_mag == f64::INFINITY {
        // exactly at a pole; from_polar would produce inf·0 = NaN components
        return Complex64::new(f64::INFINITY, 0.0);
    }
    Complex64::from_polar(log_mag.exp(), phase)
}

fn check_branch_points(z: Complex64, p: &SurfaceParams) -> Result<[Complex64; 8]> {
    let v = p.branch_points();
    let mut n = [Complex64::new(0.0, 0.0); 8];
    for k in 0..8 {
        n[k] = z - v[k];
        let d = n[k].norm();
        if d < BRANCH_EXCLUSION {
            return Err(Error::BranchPoint { branch_point: v[k], distance: d });
        }
    }
    Ok(n)
}

/// Integrand values of the Weierstrass data at z in the closed upper half plane.
pub fn eval_forms(z: Complex64, p: &SurfaceParams) -> Result<FormVector> {
    if z.im < 0.0 {
        return Err(Error::Domain { func: "eval_forms", msg: format!("Im z = {} < 0", z.im) });
    }
    let n = check_branch_points(z, p)?;
    let dh = I * branch_product(&n, 0.0, &EXP_DH);
    let phi1 = -p.rho * branch_product(&n, 0.0, &EXP_PHI1);
    let phi2 = branch_product(&n, 0.0, &EXP_PHI2) / p.rho;
    Ok(FormVector::from_phi(phi1, phi2, dh))
}

/// Gauss map G(z) = ρ i (z−1/a)^½ (z+a)^½ (z+1/b)^−½ (z−b)^−½.
pub fn gauss_map_z(z: Complex64, p: &SurfaceParams) -> Result<Complex64> {
    let n = check_branch_points(z, p)?;
    Ok(I * p.rho * branch_product(&n, 0.0, &EXP_G))
}

/// Cayley disk coordinate: z = i(1+w)/(1−w), mapping the unit disk onto the
/// upper half plane with w = 0 at z = i.
pub mod disk {
    use super::*;

    /// Boundary angle φ of the real point z: w = e^{iφ}, φ ∈ (0, 2π).
    pub fn boundary_angle(x: f64) -> f64 {
        PI + 2.0 * x.atan()
    }

    pub fn z_of_w(w: Complex64) -> Complex64 {
        I * (1.0 + w) / (1.0 - w)
    }

    /// Pulled-back forms Ω(w) = ω(z(w)) z′(w) at w = e^{iφ}(1 − d), with `d`
    /// the distance to the unit circle along the ray. `markers[k]` is true
    /// when φ is exactly the boundary angle of v_k, in which case the factor
    /// (z − v_k) is formed without cancellation.
    pub fn forms(phi: f64, d: f64, p: &SurfaceParams, marker: Option<usize>) -> FormVector {
        let v = p.branch_points();
        let e = Complex64::from_polar(1.0, phi);
        // 1 − w = (1 − e^{iφ}) + d e^{iφ},   1 − e^{iφ} = −2i sin(φ/2) e^{iφ/2}
        let one_minus_e = -2.0 * I * (0.5 * phi).sin() * Complex64::from_polar(1.0, 0.5 * phi);
        let dd = one_minus_e + d * e;
        let d_arg = dd.arg();
        let mut n = [Complex64::new(0.0, 0.0); 8];
        for k in 0..8 {
            // z − v = A/(1 − w),  A = (i − v) + (i + v) w
            let iv = I + v[k];
            let a_end = if marker == Some(k) { Complex64::new(0.0, 0.0) } else { (I - v[k]) + iv * e };
            n[k] = a_end - iv * e * d;
        }
        // z′(w) = 2i/(1 − w)²; the |1 − w|² factors cancel against the forms
        let jac = Complex64::from_polar(2.0, 0.5 * PI - 2.0 * d_arg);
        let dh = I * branch_product(&n, d_arg, &EXP_DH) * jac;
        let phi1 = -p.rho * branch_product(&n, d_arg, &EXP_PHI1) * jac;
        let phi2 = branch_product(&n, d_arg, &EXP_PHI2) * jac / p.rho;
        FormVector::from_phi(phi1, phi2, dh)
    }

    /// Gauss map at the same disk point.
    pub fn gauss_map(phi: f64, d: f64, p: &SurfaceParams, marker: Option<usize>) -> Complex64 {
        let v = p.branch_points();
        let e = Complex64::from_polar(1.0, phi);
        let one_minus_e = -2.0 * I * (0.5 * phi).sin() * Complex64::from_polar(1.0, 0.5 * phi);
        let d_arg = (one_minus_e + d * e).arg();
        let mut n = [Complex64::new(0.0, 0.0); 8];
        for k in 0..8 {
            let iv = I + v[k];
            let a_end = if marker == Some(k) { Complex64::new(0.0, 0.0) } else { (I - v[k]) + iv * e };
            n[k] = a_end - iv * e * d;
        }
        I * p.rho * branch_product(&n, d_arg, &EXP_G)
    }
}

/// Principal-branch square root with arg(x) taken in [0, π].
fn half_sqrt(x: Complex64) -> Complex64 {
    Complex64::from_polar(x.norm().sqrt(), 0.5 * half_plane_arg(x, 0.0))
}

/// Simplified forms (φ1, φ2) in the ζ coordinate at ζ in the closed upper half plane.
///
/// ζ = z − 1/z identifies z with −1/z, and (ζ² + 4)^½ = ±(z + 1/z). With the
/// positive root used here these are the pushforwards of φ1, φ2 from the
/// sheet Re z > 0 and their negatives from Re z < 0; period lengths agree.
pub fn eval_simplified_forms(zeta: Complex64, s: &SimplifiedParams, rho: f64) -> Result<(Complex64, Complex64)> {
    for v in [-s.tau, -s.alpha, s.beta, s.tau] {
        let d = (zeta - v).norm();
        if d < BRANCH_EXCLUSION {
            return Err(Error::BranchPoint { branch_point: v, distance: d });
        }
    }
    // (ζ² + 4)^½ is positive on the real axis and continuous for Im ζ < 2
    let common = half_sqrt(zeta + s.tau) * half_sqrt(zeta - s.tau) * (zeta * zeta + 4.0).sqrt();
    let ra = half_sqrt(zeta + s.alpha);
    let rb = half_sqrt(zeta - s.beta);
    Ok((-rho * ra / (rb * common), rb / (rho * ra * common)))
}

/// Gauss map in the simplified coordinate: G(ζ) = ρ i (ζ+α)^½ (ζ−β)^−½.
pub fn gauss_map(zeta: Complex64, s: &SimplifiedParams, rho: f64) -> Result<Complex64> {
    let d = (zeta - s.beta).norm();
    if d < BRANCH_EXCLUSION {
        return Err(Error::Pole { func: "gauss_map", distance: d });
    }
    Ok(I * rho * half_sqrt(zeta + s.alpha) / half_sqrt(zeta - s.beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntipodalReport {
    pub antipodal: bool,
    /// |ρ²√((α²+4)/(β²+4)) − 1|, i.e. |G(2i)| = 1 at the octagon centre.
    pub center_residual: f64,
    /// |ρ²√((τ²−α²)/(τ²−β²)) − 1|, i.e. G(τ)G(−τ) = −1.
    pub branch_residual: f64,
}

/// Whether the branched values of the Gauss map are antipodal.
pub fn antipodal_check(s: &SimplifiedParams, rho: f64) -> AntipodalReport {
    let SimplifiedParams { alpha, beta, tau } = *s;
    let r2 = rho * rho;
    let center_residual = (r2 * ((alpha * alpha + 4.0) / (beta * beta + 4.0)).sqrt() - 1.0).abs();
    let branch_residual = (r2 * ((tau * tau - alpha * alpha) / (tau * tau - beta * beta)).sqrt() - 1.0).abs();
    AntipodalReport {
        antipodal: center_residual < ANTIPODAL_TOL && branch_residual < ANTIPODAL_TOL,
        center_residual,
        branch_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> SurfaceParams {
        SurfaceParams::new(1.2, 1.5, 3.0, 0.9).unwrap()
    }

    #[test]
    fn simplify_round_trip() {
        let p = SurfaceParams::new(2f64.sqrt(), 2f64.sqrt(), 2.0, 1.0).unwrap();
        let s = simplify(&p).unwrap();
        assert!((s.alpha - 0.5f64.sqrt()).abs() < 1e-15 && (s.tau - 1.5).abs() < 1e-15);
        let p = SurfaceParams::new(1.2, 1.5, 3.0, 1.0).unwrap();
        let q = unsimplify(&simplify(&p).unwrap(), 1.0).unwrap();
        assert!((q.a - p.a).abs() < 1e-14 && (q.b - p.b).abs() < 1e-14 && (q.t - p.t).abs() < 1e-14);
        assert!(SurfaceParams::new(1.5, 0.5, 3.0, 1.0).is_err());
        assert!(SurfaceParams::new(1.2, 1.5, 1.4, 1.0).is_err());
        assert!(SimplifiedParams::new(1.0, -2.0, 3.0).is_err());
        assert!((z_of(-1e8) - 1e-8).abs() < 1e-22);
    }

    #[test]
    fn dh_at_i_matches_direct_product() {
        let p = sample();
        let f = eval_forms(I, &p).unwrap();
        let t = p.t;
        // independent: i / sqrt((i²−t²)(i²−1/t²)), both radicands negative real
        let direct = I / (c(-(1.0 + t * t), 0.0).sqrt() * c(-(1.0 + 1.0 / (t * t)), 0.0).sqrt());
        assert!((f.omega3 - direct).norm() < 1e-14, "{} vs {}", f.omega3, direct);
        assert!(f.omega3.re.abs() < 1e-15);
    }

    #[test]
    fn null_curve_and_gauss_consistency() {
        let p = sample();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0));
            let f = eval_forms(z, &p).unwrap();
            assert!(f.null_residual() < 1e-10 * (1.0 + f.phi1.norm() * f.phi2.norm()));
        }
        let z = c(0.5, 0.5);
        let f = eval_forms(z, &p).unwrap();
        let g = gauss_map_z(z, &p).unwrap();
        assert!((f.phi1 - f.omega3 * g).norm() < 1e-13);
        assert!((f.phi2 - f.omega3 / g).norm() < 1e-13);
        assert!(matches!(eval_forms(c(p.b, 0.0), &p), Err(Error::BranchPoint { .. })));
    }

    #[test]
    fn boundary_phases() {
        let p = sample();
        let v = p.branch_points();
        // (v2, v3): both integrands negative real
        let f = eval_forms(c(0.5 * (v[1] + v[2]), 0.0), &p).unwrap();
        assert!(f.phi1.re < 0.0 && f.phi1.im.abs() < 1e-14 * f.phi1.norm());
        assert!(f.phi2.re < 0.0 && f.phi2.im.abs() < 1e-14 * f.phi2.norm());
        // (v1, v2): φ1 negative imaginary, φ2 positive imaginary
        let f = eval_forms(c(0.5 * (v[0] + v[1]), 0.0), &p).unwrap();
        assert!(f.phi1.im < 0.0 && f.phi1.re.abs() < 1e-14 * f.phi1.norm());
        assert!(f.phi2.im > 0.0 && f.phi2.re.abs() < 1e-14 * f.phi2.norm());
        // (v7, v8): the opposite signs
        let f = eval_forms(c(0.5 * (v[6] + v[7]), 0.0), &p).unwrap();
        assert!(f.phi1.im > 0.0 && f.phi2.im < 0.0);
    }

    #[test]
    fn continuity_around_branch_points() {
        let p = sample();
        for v in p.branch_points() {
            let mut prev = eval_forms(c(v + 1e-3, 0.0), &p).unwrap();
            for k in 1..=200 {
                let th = PI * k as f64 / 200.0;
                let z = c(v, 0.0) + Complex64::from_polar(1e-3, th);
                let f = eval_forms(z, &p).unwrap();
                let scale = f.phi1.norm() + f.phi2.norm() + f.omega3.norm();
                assert!((f.phi1 - prev.phi1).norm() < 0.1 * scale, "jump near v = {v}");
                assert!((f.phi2 - prev.phi2).norm() < 0.1 * scale);
                prev = f;
            }
        }
    }

    #[test]
    fn simplified_forms_are_the_pushforward() {
        let p = sample();
        let s = simplify(&p).unwrap();
        // near the real axis both sides are fixed by the same branch rule
        for z in [c(0.3, 1e-3), c(-1.7, 1e-3), c(2.5, 1e-3), c(-0.5, 1e-3), c(0.7, 1e-3), c(-4.0, 1e-3)] {
            let f = eval_forms(z, &p).unwrap();
            let zeta = z - 1.0 / z;
            let dzeta = 1.0 + 1.0 / (z * z);
            let (p1, p2) = eval_simplified_forms(zeta, &s, p.rho).unwrap();
            let dzeta = dzeta * z.re.signum();
            assert!((p1 * dzeta - f.phi1).norm() < 1e-12 * f.phi1.norm(), "{z}: {} vs {}", p1 * dzeta, f.phi1);
            assert!((p2 * dzeta - f.phi2).norm() < 1e-12 * f.phi2.norm());
            let g = gauss_map(zeta, &s, p.rho).unwrap();
            assert!((g - gauss_map_z(z, &p).unwrap()).norm() < 1e-12 * g.norm());
        }
    }

    #[test]
    fn disk_forms_match_half_plane_forms() {
        let p = sample();
        for (phi, d) in [(0.7, 0.3), (2.0, 0.01), (4.0, 0.5), (5.9, 1e-4)] {
            let w = Complex64::from_polar(1.0 - d, phi);
            let z = disk::z_of_w(w);
            let jac = 2.0 * I / ((1.0 - w) * (1.0 - w));
            let f = eval_forms(z, &p).unwrap();
            let g = disk::forms(phi, d, &p, None);
            for (x, y) in f.as_array().iter().zip(g.as_array()) {
                assert!((x * jac - y).norm() < 1e-11 * (1.0 + y.norm()), "φ={phi}: {} vs {}", x * jac, y);
            }
            let gz = gauss_map_z(z, &p).unwrap();
            assert!((gz - disk::gauss_map(phi, d, &p, None)).norm() < 1e-11 * gz.norm());
        }
        // z = ∞ is a regular point of the pulled-back forms
        let f = disk::forms(0.0, 0.0, &p, None);
        assert!(f.omega3.norm().is_finite() && f.omega3.norm() > 0.0);
        assert!((disk::boundary_angle(0.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn gauss_map_values() {
        let s = SimplifiedParams::new(0.8, 1.2, 3.0).unwrap();
        let rho = 1.3;
        let g = gauss_map(c(0.0, 1e6), &s, rho).unwrap();
        assert!((g.norm() - rho).abs() < 1e-6);
        let g = gauss_map(c(0.0, 2.0), &s, rho).unwrap();
        let expect = rho * ((0.64f64 + 4.0) / (1.44 + 4.0)).powf(0.25);
        assert!((g.norm() - expect).abs() < 1e-14);
        let prod = gauss_map(c(s.tau, 0.0), &s, rho).unwrap() * gauss_map(c(-s.tau, 0.0), &s, rho).unwrap();
        let expect = rho * rho * ((9.0f64 - 0.64) / (9.0 - 1.44)).sqrt();
        assert!((prod.norm() - expect).abs() < 1e-13 && prod.re < 0.0);
        // ζ ↦ −ζ̄ inverts |G| when α = β and ρ = 1
        let s = SimplifiedParams::new(1.0, 1.0, 3.0).unwrap();
        let zeta = c(0.4, 0.9);
        let g1 = gauss_map(zeta, &s, 1.0).unwrap();
        let g2 = gauss_map(-zeta.conj(), &s, 1.0).unwrap();
        assert!((g1.norm() * g2.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn antipodality() {
        let s = SimplifiedParams::new(1.0, 1.0, 3.0).unwrap();
        assert!(antipodal_check(&s, 1.0).antipodal);
        let s = SimplifiedParams::new(0.8, 1.2, 3.0).unwrap();
        for rho in [0.5, 0.9, 1.0, 1.1] {
            assert!(!antipodal_check(&s, rho).antipodal);
        }
        let s = SimplifiedParams::new(2.0, 2.0, 5.0).unwrap();
        let r = antipodal_check(&s, 1.1);
        assert!(!r.antipodal && (r.center_residual - 0.21).abs() < 1e-12);
    }
}
