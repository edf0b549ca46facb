//! Weierstrass ζ, ℘ and ℘′ on a lattice, evaluated from the Jacobi theta
//! function θ₁ after reducing the period basis to the fundamental domain.
//!
//! With half-periods ω₁, ω₃ (Im ω₃/ω₁ > 0), nome q = exp(iπ ω₃/ω₁) and
//! v = πz/(2ω₁):
//!
//! ```text
//! ζ(z) = η₁ z/ω₁ + (π/2ω₁) θ₁′(v)/θ₁(v),   η₁ = −π² θ₁‴(0) / (12 ω₁ θ₁′(0))
//! ℘(z) = −ζ′(z),   ℘′(z) = −(π/2ω₁)³ (log θ₁)‴(v)
//! ```

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// Minimum distance from a lattice point for ζ and ℘.
pub const POLE_EXCLUSION: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Period lattice with a reduced basis and the matching quasi-periods.
#[derive(Debug, Clone)]
pub struct Lattice {
    /// Reduced full periods (w1, w2) with Im(w2/w1) > 0, |Re(w2/w1)| ≤ 1/2, |w2/w1| ≥ 1.
    w1: Complex64,
    w2: Complex64,
    /// Quasi-periods: ζ(z + w_k) − ζ(z) = h_k.
    h1: Complex64,
    h2: Complex64,
    /// θ-series nome powers q^{(n+1/2)²}, n = 0, 1, ...
    qpow: Vec<Complex64>,
}

impl Lattice {
    /// Lattice spanned by two full periods that are linearly independent over ℝ.
    pub fn new(p1: Complex64, p2: Complex64) -> Result<Self> {
        let (mut w1, mut w2) = (p1, p2);
        if (w2 / w1).im.abs() < 1e-14 {
            return Err(domain("Lattice::new", "periods are collinear"));
        }
        if (w2 / w1).im < 0.0 {
            std::mem::swap(&mut w1, &mut w2);
        }
        // Gauss reduction of the ratio into the fundamental domain.
        for _ in 0..64 {
            let tau = w2 / w1;
            let shift = tau.re.round();
            if shift != 0.0 {
                w2 -= w1 * shift;
                continue;
            }
            if tau.norm_sqr() < 1.0 - 1e-15 {
                let old = w1;
                w1 = w2;
                w2 = -old;
                continue;
            }
            break;
        }
        let omega1 = 0.5 * w1;
        let omega3 = 0.5 * w2;
        let tau = omega3 / omega1;
        let qpow: Vec<Complex64> = (0..24)
            .map(|n| {
                let e = (n as f64 + 0.5).powi(2);
                (I * PI * tau * e).exp()
            })
            .take_while(|q| q.norm() > 1e-300)
            .collect();

        let mut lattice = Self { w1, w2, h1: Complex64::new(0.0, 0.0), h2: Complex64::new(0.0, 0.0), qpow };
        // θ₁′(0) and θ₁‴(0)
        let (mut d1, mut d3) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (n, q) in lattice.qpow.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let k = (2 * n + 1) as f64;
            d1 += 2.0 * sign * q * k;
            d3 -= 2.0 * sign * q * k * k * k;
        }
        let eta1 = -PI * PI * d3 / (12.0 * omega1 * d1);
        // Legendre relation η₁ω₃ − η₃ω₁ = iπ/2
        let eta3 = (eta1 * omega3 - I * PI / 2.0) / omega1;
        lattice.h1 = 2.0 * eta1;
        lattice.h2 = 2.0 * eta3;
        Ok(lattice)
    }

    /// Reduced basis (w1, w2).
    pub fn basis(&self) -> (Complex64, Complex64) {
        (self.w1, self.w2)
    }

    /// Real coordinates (x, y) with z = x·w1 + y·w2.
    fn coords(&self, z: Complex64) -> (f64, f64) {
        let (a, b) = (self.w1, self.w2);
        let det = a.re * b.im - a.im * b.re;
        let x = (z.re * b.im - z.im * b.re) / det;
        let y = (a.re * z.im - a.im * z.re) / det;
        (x, y)
    }

    /// Quasi-period of an arbitrary lattice vector `t`: ζ(z + t) − ζ(z).
    pub fn quasi_period(&self, t: Complex64) -> Result<Complex64> {
        let (x, y) = self.coords(t);
        let (n, k) = (x.round(), y.round());
        if (x - n).abs() > 1e-9 || (y - k).abs() > 1e-9 {
            return Err(domain("Lattice::quasi_period", "argument is not a lattice vector"));
        }
        Ok(self.h1 * n + self.h2 * k)
    }

    /// Splits z = z0 + n·w1 + k·w2 with z0 in the centred period cell.
    fn reduce(&self, z: Complex64) -> (Complex64, f64, f64) {
        let (x, y) = self.coords(z);
        let (n, k) = (x.round(), y.round());
        (z - self.w1 * n - self.w2 * k, n, k)
    }

    fn check_pole(&self, func: &'static str, z0: Complex64) -> Result<()> {
        let mut dist = f64::INFINITY;
        for i in -1..=1 {
            for j in -1..=1 {
                let p = self.w1 * i as f64 + self.w2 * j as f64;
                dist = dist.min((z0 - p).norm());
            }
        }
        if dist < POLE_EXCLUSION {
            return Err(Error::Pole { func, distance: dist });
        }
        Ok(())
    }

    /// θ₁ and its first three derivatives at v.
    fn theta1(&self, v: Complex64) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (n, q) in self.qpow.iter().enumerate() {
            let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
            let k = (2 * n + 1) as f64;
            let arg = v * k;
            let (s, c) = (arg.sin(), arg.cos());
            let a = q * sign;
            out[0] += a * s;
            out[1] += a * c * k;
            out[2] -= a * s * (k * k);
            out[3] -= a * c * (k * k * k);
        }
        out
    }

    fn scale(&self) -> Complex64 {
        PI / self.w1
    }

    /// Weierstrass ζ(z).
    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        let (z0, n, k) = self.reduce(z);
        self.check_pole("zeta", z0)?;
        let c = self.scale();
        let th = self.theta1(z0 * c);
        let eta1 = 0.5 * self.h1;
        let omega1 = 0.5 * self.w1;
        Ok(eta1 * z0 / omega1 + c * th[1] / th[0] + self.h1 * n + self.h2 * k)
    }

    /// Weierstrass ℘(z).
    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, _) = self.reduce(z);
        self.check_pole("wp", z0)?;
        let c = self.scale();
        let th = self.theta1(z0 * c);
        let l1 = th[1] / th[0];
        let l2 = th[2] / th[0] - l1 * l1;
        let eta1 = 0.5 * self.h1;
        let omega1 = 0.5 * self.w1;
        Ok(-eta1 / omega1 - c * c * l2)
    }

    /// Derivative ℘′(z).
    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        let (z0, _, _) = self.reduce(z);
        self.check_pole("wp_prime", z0)?;
        let c = self.scale();
        let th = self.theta1(z0 * c);
        let l1 = th[1] / th[0];
        let l3 = th[3] / th[0] - 3.0 * th[2] * th[1] / (th[0] * th[0]) + 2.0 * l1 * l1 * l1;
        Ok(-c * c * c * l3)
    }
}

/// Rhombic torus spanned by T₁ = e^{iθ/2} and T₂ = e^{−iθ/2}, with T₃ = −T₁ − T₂.
#[derive(Debug, Clone, Serialize)]
pub struct RhombicTorus {
    pub theta: f64,
    #[serde(serialize_with = "ser_c")]
    pub t1: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub t2: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub t3: Complex64,
    /// η_i = 2ζ(T_i/2), the quasi-period of T_i.
    #[serde(serialize_with = "ser_c")]
    pub eta1: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub eta2: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub eta3: Complex64,
    #[serde(skip)]
    lattice: Lattice,
}

fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl RhombicTorus {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(domain("RhombicTorus::new", format!("theta = {theta} not in (0, π)")));
        }
        let t1 = Complex64::from_polar(1.0, theta / 2.0);
        let t2 = t1.conj();
        // T₃ = −2cos(θ/2), exactly real
        let t3 = Complex64::new(-2.0 * (theta / 2.0).cos(), 0.0);
        let lattice = Lattice::new(t1, t2)?;
        let eta1 = lattice.quasi_period(t1)?;
        let eta2 = lattice.quasi_period(t2)?;
        // −η₁ − η₂ is exact by linearity of the quasi-period map
        let eta3 = -eta1 - eta2;
        Ok(Self { theta, t1, t2, t3, eta1, eta2, eta3, lattice })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn zeta(&self, z: Complex64) -> Result<Complex64> {
        self.lattice.zeta(z)
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        self.lattice.wp(z)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        self.lattice.wp_prime(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct lattice-sum oracle for ℘ on the square lattice spanned by 1 and i:
    /// ℘(z) = 1/z² + Σ' [1/(z−w)² − 1/w²] with symmetric truncation, plus the
    /// tail correction that vanishes for the square lattice by symmetry.
    fn wp_lattice_sum(z: Complex64, n: i32) -> Complex64 {
        let mut s = 1.0 / (z * z);
        for i in -n..=n {
            for j in -n..=n {
                if i == 0 && j == 0 {
                    continue;
                }
                let w = c(i as f64, j as f64);
                s += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
            }
        }
        s
    }

    #[test]
    fn square_lattice_matches_direct_sum() {
        let lat = Lattice::new(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let z = c(0.31, 0.17);
        let direct = wp_lattice_sum(z, 400);
        let theta = lat.wp(z).unwrap();
        assert!((direct - theta).norm() < 1e-4, "{direct} vs {theta}");
        // lemniscatic case: ℘(1/2) = e₁ = Γ(1/4)⁴/(8π) for the unit square lattice
        let e1 = 6.875_185_818_020_373;
        assert!((lat.wp(c(0.5, 0.0)).unwrap() - e1).norm() < 1e-12);
    }

    #[test]
    fn oddness_evenness_and_quasi_periodicity() {
        let torus = RhombicTorus::new(1.1).unwrap();
        let z = 0.25 * torus.t3 + c(0.05, 0.11);
        let lhs = torus.zeta(z + torus.t1).unwrap() - torus.zeta(z).unwrap();
        assert!((lhs - torus.eta1).norm() < 1e-11);
        let lhs = torus.zeta(z + torus.t2).unwrap() - torus.zeta(z).unwrap();
        assert!((lhs - torus.eta2).norm() < 1e-11);
        let t = RhombicTorus::new(1.0).unwrap();
        let z = 0.3 * t.t3;
        assert!((t.zeta(-z).unwrap() + t.zeta(z).unwrap()).norm() < 1e-13);
        let z = c(0.13, -0.29);
        assert!((t.wp(-z).unwrap() - t.wp(z).unwrap()).norm() < 1e-11);
        assert!((t.wp_prime(-z).unwrap() + t.wp_prime(z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn eta_is_twice_zeta_at_half_period() {
        let t = RhombicTorus::new(0.8).unwrap();
        for (ti, eta) in [(t.t1, t.eta1), (t.t2, t.eta2), (t.t3, t.eta3)] {
            assert!((2.0 * t.zeta(0.5 * ti).unwrap() - eta).norm() < 1e-12);
        }
    }

    #[test]
    fn legendre_and_sum_relations() {
        for &theta in &[0.5, 1.0, PI / 3.0, 1.23, 2.5, 0.2] {
            let t = RhombicTorus::new(theta).unwrap();
            assert!((t.eta1 + t.eta2 + t.eta3).norm() < 1e-11);
            let leg = t.eta1 * t.t2 - t.eta2 * t.t1;
            assert!((leg.norm() - 2.0 * PI).abs() < 1e-11 && leg.re.abs() < 1e-11, "θ={theta}: {leg}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let t = RhombicTorus::new(1.2).unwrap();
        let h = 1e-5;
        for z in [c(0.2, 0.1), c(-0.4, 0.3), 0.37 * t.t3] {
            let dz = (t.zeta(z + h).unwrap() - t.zeta(z - h).unwrap()) / (2.0 * h);
            assert!((dz + t.wp(z).unwrap()).norm() < 1e-6);
            let dp = (t.wp(z + h).unwrap() - t.wp(z - h).unwrap()) / (2.0 * h);
            assert!((dp - t.wp_prime(z).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn real_on_the_t3_axis() {
        for &theta in &[0.4, 1.0, 1.5, 2.8] {
            let t = RhombicTorus::new(theta).unwrap();
            for i in 1..20 {
                let x = i as f64 / 20.0;
                assert!(t.zeta(x * t.t3).unwrap().im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pole_is_reported() {
        let t = RhombicTorus::new(1.0).unwrap();
        assert!(matches!(t.zeta(c(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(t.wp(t.t1 + t.t2).is_err());
        assert!(RhombicTorus::new(0.0).is_err());
        assert!(Lattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }
}
