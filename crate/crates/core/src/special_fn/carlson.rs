//! Carlson symmetric elliptic integrals R_C, R_F, R_D and R_J for real
//! arguments, evaluated by the duplication theorem followed by the
//! fifth-order Taylor expansion about the mean (Carlson 1995).

use crate::error::{domain, Result};

const EPS: f64 = f64::EPSILON;

/// R_C(x, y) = 1/2 ∫ (t+x)^(-1/2) (t+y)^(-1) dt for x ≥ 0, y > 0.
pub fn rc(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0) || !(y > 0.0) {
        return Err(domain("rc", format!("need x >= 0, y > 0 (x = {x}, y = {y})")));
    }
    // Series in s = (y - x)/y near x = y avoids the 0/0 of the closed forms.
    let s = (y - x) / y;
    if s.abs() < 1e-3 {
        // y^(1/2) R_C(x, y) = asin(√s)/√s = Σ c_k s^k / (2k+1), with c_k the
        // binomial coefficients of (1-s)^(-1/2).
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..12 {
            term *= s * (2 * k - 1) as f64 / (2 * k) as f64;
            sum += term / (2 * k + 1) as f64;
        }
        return Ok(sum / y.sqrt());
    }
    if x < y {
        if x == 0.0 {
            return Ok(std::f64::consts::FRAC_PI_2 / y.sqrt());
        }
        let d = (y - x).sqrt();
        Ok((d / x.sqrt()).atan() / d)
    } else {
        let d = (x - y).sqrt();
        Ok((d / x.sqrt()).atanh() / d)
    }
}

/// R_F(x, y, z) = 1/2 ∫ [(t+x)(t+y)(t+z)]^(-1/2) dt, at most one argument zero.
pub fn rf(x: f64, y: f64, z: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0 && z >= 0.0) {
        return Err(domain("rf", "arguments must be non-negative"));
    }
    if (x == 0.0) as u8 + (y == 0.0) as u8 + (z == 0.0) as u8 > 1 {
        return Err(domain("rf", "at most one argument may vanish"));
    }
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * EPS).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut f = 1.0;
    while f * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        f *= 0.25;
    }
    let xd = (a0 - x0) / a * f;
    let yd = (a0 - y0) / a * f;
    let zd = -(xd + yd);
    let e2 = xd * yd - zd * zd;
    let e3 = xd * yd * zd;
    Ok((1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt())
}

/// R_D(x, y, z) = 3/2 ∫ [(t+x)(t+y)]^(-1/2) (t+z)^(-3/2) dt, z > 0.
pub fn rd(x: f64, y: f64, z: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) || !(z > 0.0) || x + y == 0.0 {
        return Err(domain("rd", "need x, y >= 0 (not both zero) and z > 0"));
    }
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (0.25 * EPS).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs());
    let mut a = a0;
    let mut f = 1.0;
    let mut sum = 0.0;
    while f * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        sum += f / (sz * (z + lambda));
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        a = 0.25 * (a + lambda);
        f *= 0.25;
    }
    let xd = (a0 - x0) / a * f;
    let yd = (a0 - y0) / a * f;
    let zd = -(xd + yd) / 3.0;
    let xy = xd * yd;
    let z2 = zd * zd;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zd;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zd;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    Ok(f * series / (a * a.sqrt()) + 3.0 * sum)
}

/// R_J(x, y, z, p) = 3/2 ∫ [(t+x)(t+y)(t+z)]^(-1/2) (t+p)^(-1) dt for p > 0.
///
/// Negative p (Cauchy principal value) is not needed here: callers map
/// characteristics n > 1 onto (0, 1) before reaching this routine.
pub fn rj(x: f64, y: f64, z: f64, p: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0 && z >= 0.0) || !(p > 0.0) {
        return Err(domain("rj", "need x, y, z >= 0 and p > 0"));
    }
    if (x == 0.0) as u8 + (y == 0.0) as u8 + (z == 0.0) as u8 > 1 {
        return Err(domain("rj", "at most one of x, y, z may vanish"));
    }
    let (x0, y0, z0) = (x, y, z);
    let (mut x, mut y, mut z, mut p) = (x, y, z, p);
    let a0 = (x + y + z + 2.0 * p) / 5.0;
    let delta = (p - x) * (p - y) * (p - z);
    let q = (0.25 * EPS).powf(-1.0 / 6.0) * (a0 - x).abs().max((a0 - y).abs()).max((a0 - z).abs()).max((a0 - p).abs());
    let mut a = a0;
    let mut f = 1.0;
    let mut f3 = 1.0;
    let mut sum = 0.0;
    while f * q >= a.abs() {
        let (sx, sy, sz, sp) = (x.sqrt(), y.sqrt(), z.sqrt(), p.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        let d = (sp + sx) * (sp + sy) * (sp + sz);
        let e = f3 * delta / (d * d);
        sum += f * rc(1.0, 1.0 + e)? / d;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        p = 0.25 * (p + lambda);
        a = 0.25 * (a + lambda);
        f *= 0.25;
        f3 *= 1.0 / 64.0;
    }
    let xd = (a0 - x0) / a * f;
    let yd = (a0 - y0) / a * f;
    let zd = (a0 - z0) / a * f;
    let pd = -(xd + yd + zd) / 2.0;
    let e2 = xd * yd + xd * zd + yd * zd - 3.0 * pd * pd;
    let e3 = xd * yd * zd + 2.0 * e2 * pd + 4.0 * pd * pd * pd;
    let e4 = (2.0 * xd * yd * zd + e2 * pd + 3.0 * pd * pd * pd) * pd;
    let e5 = xd * yd * zd * pd * pd;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0 - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    Ok(f * series / (a * a.sqrt()) + 6.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values: DLMF 19.36 / Carlson (1995) test table.
    #[test]
    fn carlson_reference_values() {
        assert!((rf(1.0, 2.0, 0.0).unwrap() - 1.311_028_777_146_059_9).abs() < 1e-14);
        assert!((rf(2.0, 3.0, 4.0).unwrap() - 0.584_082_841_677_151_7).abs() < 1e-14);
        assert!((rc(0.0, 0.25).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        assert!((rc(2.25, 2.0).unwrap() - 2.0f64.ln()).abs() < 1e-14);
        assert!((rd(0.0, 2.0, 1.0).unwrap() - 1.797_210_352_103_388_3).abs() < 1e-13);
        assert!((rd(2.0, 3.0, 4.0).unwrap() - 0.165_105_272_942_610_5).abs() < 1e-14);
        assert!((rj(0.0, 1.0, 2.0, 3.0).unwrap() - 0.776_886_237_785_823_3).abs() < 1e-14);
        assert!((rj(2.0, 3.0, 4.0, 5.0).unwrap() - 0.142_975_796_671_567_9).abs() < 1e-14);
    }

    #[test]
    fn rc_series_matches_closed_form_across_switch() {
        for &y in &[1.0 + 0.9e-3, 1.0 + 1.1e-3, 1.0 - 0.9e-3, 1.0 - 1.1e-3] {
            let v = rc(1.0, y).unwrap();
            let h = 1e-9;
            // neighbours on either side of the branch switch must be continuous
            let w = rc(1.0, y + h).unwrap();
            assert!((v - w).abs() < 1e-8, "y = {y}");
        }
        assert!((rc(1.0, 1.0).unwrap() - 1.0).abs() < 1e-16);
    }

    #[test]
    fn rd_is_rj_with_p_equal_z() {
        let (x, y, z) = (0.3, 1.7, 2.2);
        assert!((rd(x, y, z).unwrap() - rj(x, y, z, z).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(rf(-1.0, 1.0, 1.0).is_err());
        assert!(rf(0.0, 0.0, 1.0).is_err());
        assert!(rd(1.0, 1.0, 0.0).is_err());
        assert!(rj(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(rc(1.0, 0.0).is_err());
    }
}
