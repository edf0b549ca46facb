//! Complete elliptic integrals in the parameter convention `m = k²`:
//!
//! ```text
//! K(m)    = ∫₀^{π/2} (1 − m sin²θ)^(−1/2) dθ
//! E(m)    = ∫₀^{π/2} (1 − m sin²θ)^(1/2) dθ
//! Π(n, m) = ∫₀^{π/2} (1 − n sin²θ)^(−1) (1 − m sin²θ)^(−1/2) dθ
//! ```
//!
//! Note that some libraries use the modulus `k` instead of `m`; every
//! function here takes `m`.

use super::carlson::{rd, rf, rj};
use crate::error::{domain, Error, Result};

/// Parameters closer to 1 than this are rejected by [`ell_k`].
pub const K_SINGULAR_MARGIN: f64 = 1e-15;

/// Validated elliptic parameter `m = k²` with `0 ≤ m < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(m: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&m) {
            return Err(domain("EllipticModulus", format!("m = {m} not in [0, 1)")));
        }
        Ok(Self(m))
    }

    pub fn m(self) -> f64 {
        self.0
    }

    /// The complementary parameter `1 − m`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }

    pub fn k(self) -> Result<f64> {
        ell_k(self.0)
    }

    pub fn e(self) -> Result<f64> {
        ell_e(self.0)
    }
}

fn check_k_domain(func: &'static str, m: f64) -> Result<()> {
    if !(m >= 0.0) || m > 1.0 - K_SINGULAR_MARGIN {
        return Err(domain(func, format!("m = {m} outside [0, 1 - {K_SINGULAR_MARGIN:e}]")));
    }
    Ok(())
}

/// Complete elliptic integral of the first kind K(m).
pub fn ell_k(m: f64) -> Result<f64> {
    check_k_domain("ell_k", m)?;
    rf(0.0, 1.0 - m, 1.0)
}

/// Complete elliptic integral of the second kind E(m), `0 ≤ m ≤ 1`.
pub fn ell_e(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(domain("ell_e", format!("m = {m} outside [0, 1]")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let mc = 1.0 - m;
    Ok(rf(0.0, mc, 1.0)? - m / 3.0 * rd(0.0, mc, 1.0)?)
}

/// Associated integral K̄(m) = K(1 − m).
pub fn ell_kbar(m: f64) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(domain("ell_kbar", format!("m = {m} outside (0, 1]")));
    }
    ell_k(1.0 - m)
}

/// Associated integral Ē(m) = E(1 − m).
pub fn ell_ebar(m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(domain("ell_ebar", format!("m = {m} outside [0, 1]")));
    }
    ell_e(1.0 - m)
}

/// D(m) = (K(m) − E(m)) / m, evaluated without cancellation as R_D(0, 1−m, 1)/3.
///
/// Tends to π/4 as m → 0.
pub fn ell_d(m: f64) -> Result<f64> {
    check_k_domain("ell_d", m)?;
    Ok(rd(0.0, 1.0 - m, 1.0)? / 3.0)
}

/// Complete elliptic integral of the third kind Π(n, m).
///
/// For `n > 1` the integrand has a simple pole on (0, π/2) and the Cauchy
/// principal value is returned, through the exchange `Π(n, m) = K(m) − Π(m/n, m)`
/// that maps the characteristic into (0, m).
pub fn ell_pi(n: f64, m: f64) -> Result<f64> {
    check_k_domain("ell_pi", m)?;
    if !n.is_finite() {
        return Err(domain("ell_pi", "characteristic must be finite"));
    }
    if (n - 1.0).abs() <= f64::EPSILON {
        return Err(domain("ell_pi", "characteristic n = 1 is a non-integrable singularity"));
    }
    let k = rf(0.0, 1.0 - m, 1.0)?;
    if n > 1.0 {
        if n <= m {
            return Err(domain("ell_pi", format!("principal value needs n > m (n = {n}, m = {m})")));
        }
        let n_exchanged = m / n;
        return Ok(k - pi_below_one(n_exchanged, m, k)?);
    }
    pi_below_one(n, m, k)
}

fn pi_below_one(n: f64, m: f64, k: f64) -> Result<f64> {
    if n == 0.0 {
        return Ok(k);
    }
    Ok(k + n / 3.0 * rj(0.0, 1.0 - m, 1.0, 1.0 - n)?)
}

/// Elliptic integral singular value k_r, defined by K′(k_r²)/K(k_r²) = √r.
///
/// Only the two values needed for the square and the 60° rhombic torus are
/// available in closed form.
pub fn singular_value(r: u32) -> Result<f64> {
    match r {
        1 => Ok(std::f64::consts::FRAC_1_SQRT_2),
        3 => Ok((6f64.sqrt() - 2f64.sqrt()) / 4.0),
        _ => Err(Error::Domain { func: "singular_value", msg: format!("r = {r} unsupported (only 1 and 3)") }),
    }
}
