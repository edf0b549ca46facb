//! Tanh-sinh (double exponential) quadrature on finite intervals.
//!
//! Integrands receive the abscissa together with its distances to both
//! interval ends, so that factors like `(x - a)^(-1/2)` can be evaluated
//! without the cancellation in `x - a` near the endpoint.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Largest transformed abscissa. Beyond it the weights of an integrand with
/// inverse square-root endpoint behaviour fall below `exp(-70)`.
const T_MAX: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub target_abs_tol: f64,
    pub max_levels: usize,
    /// Endpoint exponents of the integrand (informational; the scheme itself
    /// is exponent-agnostic for any integrable algebraic singularity).
    pub endpoint_exponents: (f64, f64),
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { target_abs_tol: 1e-12, max_levels: 12, endpoint_exponents: (-0.5, -0.5) }
    }
}

impl QuadratureSpec {
    pub fn with_tol(target_abs_tol: f64) -> Self {
        Self { target_abs_tol, ..Self::default() }
    }
}

/// Values that can be integrated: real, complex, or fixed-size vectors thereof.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    /// `self += w * x`
    fn axpy(&mut self, w: f64, x: &Self);
    fn scaled(&self, w: f64) -> Self {
        let mut out = Self::zero();
        out.axpy(w, self);
        out
    }
    /// Max-norm of `self - other`.
    fn dist(&self, other: &Self) -> f64;
    fn mag(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += w * x;
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn mag(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        *self += x * w;
    }
    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn mag(&self) -> f64 {
        self.norm()
    }
}

impl<T: QuadValue, const N: usize> QuadValue for [T; N] {
    fn zero() -> Self {
        [T::zero(); N]
    }
    fn axpy(&mut self, w: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            s.axpy(w, v);
        }
    }
    fn dist(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }
    fn mag(&self) -> f64 {
        self.iter().map(QuadValue::mag).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integrates `f(x, x - a, b - x)` over `[a, b]`.
pub fn tanh_sinh<T, F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64, f64, f64) -> T,
{
    if !(b > a) {
        return Err(Error::Degenerate(format!("quadrature interval [{a}, {b}] is empty")));
    }
    let hw = 0.5 * (b - a);
    let mut evaluations = 0;
    let mut node = |t: f64, acc: &mut T| {
        let u = FRAC_PI_2 * t.sinh();
        let s = (-2.0 * u.abs()).exp();
        let small = 2.0 * hw * s / (1.0 + s);
        let large = 2.0 * hw / (1.0 + s);
        let w = hw * FRAC_PI_2 * t.cosh() * 4.0 * s / ((1.0 + s) * (1.0 + s));
        if small == 0.0 || w == 0.0 {
            return;
        }
        let (x, dl, dr) = if t >= 0.0 { (b - small, large, small) } else { (a + small, small, large) };
        evaluations += 1;
        acc.axpy(w, &f(x, dl, dr));
    };

    // Level 0: unit step over the integers in [-T_MAX, T_MAX].
    let mut sum = T::zero();
    let n0 = T_MAX.floor() as i64;
    for k in -n0..=n0 {
        node(k as f64, &mut sum);
    }
    let mut h = 1.0;
    let mut estimate = sum.scaled(h);
    let mut err = f64::INFINITY;
    for level in 1..=spec.max_levels {
        h *= 0.5;
        let mut t = h;
        while t <= T_MAX {
            node(t, &mut sum);
            node(-t, &mut sum);
            t += 2.0 * h;
        }
        let next = sum.scaled(h);
        err = next.dist(&estimate);
        estimate = next;
        let tol = spec.target_abs_tol.max(4.0 * f64::EPSILON * estimate.mag());
        if level >= 3 && err <= tol {
            return Ok(QuadResult { value: estimate, error_estimate: err, evaluations });
        }
    }
    Err(Error::NoConvergence { what: "tanh_sinh", estimate: err, target: spec.target_abs_tol })
}

/// Integrates over `[a, b]` after splitting at `breaks` (interior points,
/// any order). Distances passed to `f` are always measured to the ends of
/// the full interval.
pub fn tanh_sinh_split<T, F>(mut f: F, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64, f64, f64) -> T,
{
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let mut total = QuadResult { value: T::zero(), error_estimate: 0.0, evaluations: 0 };
    let n = edges.len() - 1;
    for i in 0..n {
        let (p, q) = (edges[i], edges[i + 1]);
        // offsets of the piece ends from the full-interval ends
        let off_l = p - a;
        let off_r = b - q;
        let piece = tanh_sinh(
            |x, dl, dr| {
                let dl_full = if i == 0 { dl } else { off_l + dl };
                let dr_full = if i == n - 1 { dr } else { off_r + dr };
                f(x, dl_full, dr_full)
            },
            p,
            q,
            spec,
        )?;
        total.value.axpy(1.0, &piece.value);
        total.error_estimate += piece.error_estimate;
        total.evaluations += piece.evaluations;
    }
    Ok(total)
}

/// Geometric breakpoints at distances `d0, 2 d0, 4 d0, ...` from one end of an
/// interval of length `len`, stopping at half the length.
pub fn geometric_breaks(d0: f64, len: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if !(d0 > 0.0) {
        return out;
    }
    let mut d = d0;
    while d < 0.5 * len {
        out.push(d);
        d *= 2.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_and_singular_integrals() {
        let spec = QuadratureSpec::default();
        let r = tanh_sinh(|x: f64, _, _| x.exp(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - (1f64.exp() - 1.0)).abs() < 1e-14);
        // ∫_0^1 dx / sqrt(x(1-x)) = π, singular at both ends
        let r = tanh_sinh(|_, dl: f64, dr: f64| 1.0 / (dl * dr).sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - PI).abs() < 1e-13, "{}", r.value);
        // ∫_{-1}^{1} sqrt((1+x)/(1-x)) dx = π
        let r = tanh_sinh(|_, dl: f64, dr: f64| (dl / dr).sqrt(), -1.0, 1.0, &spec).unwrap();
        assert!((r.value - PI).abs() < 1e-13);
    }

    #[test]
    fn complex_and_vector_values() {
        let spec = QuadratureSpec::default();
        let r = tanh_sinh(|x: f64, _, _| Complex64::new(0.0, x).exp(), 0.0, PI, &spec).unwrap();
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-14);
        let r = tanh_sinh(|x: f64, _, _| [x, x * x], 0.0, 3.0, &spec).unwrap();
        assert!((r.value[0] - 4.5).abs() < 1e-13 && (r.value[1] - 9.0).abs() < 1e-13);
    }

    #[test]
    fn split_passes_full_interval_distances() {
        let spec = QuadratureSpec::default();
        let breaks = geometric_breaks(1e-3, 2.0);
        let r = tanh_sinh_split(|_, dl: f64, dr: f64| 1.0 / (dl * dr).sqrt(), -1.0, 1.0, &breaks, &spec).unwrap();
        assert!((r.value - PI).abs() < 1e-12);
        // nearly singular: ∫_0^1 dx/(x + 1e-6) = ln(1 + 1e6)
        let breaks: Vec<f64> = geometric_breaks(1e-6, 1.0);
        let r = tanh_sinh_split(|x: f64, _, _| 1.0 / (x + 1e-6), 0.0, 1.0, &breaks, &spec).unwrap();
        assert!((r.value - (1.0f64 + 1e6).ln()).abs() < 1e-11);
    }

    #[test]
    fn empty_interval_is_an_error() {
        assert!(tanh_sinh(|x: f64, _, _| x, 1.0, 1.0, &QuadratureSpec::default()).is_err());
    }
}
