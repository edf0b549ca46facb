//! Bracketed root finding: Brent's method (bisection safeguarding secant and
//! inverse quadratic steps) and sign-change scans over a grid.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final bracket; f changes sign across it.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Stop once |f| falls below this ...
    pub ftol: f64,
    /// ... and the bracket is narrower than xtol·max(1, |x|).
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ftol: 1e-10, xtol: 1e-12, max_iter: 200 }
    }
}

/// Root of `f` in [a, b] given f(a), f(b) of opposite sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: &Tolerances) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Root { x: a, fx: 0.0, bracket: (a, a), iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: 0.0, bracket: (b, b), iterations: 0 });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket(format!("f({a}) = {fa:e}, f({b}) = {fb:e}")));
    }
    // b is the best iterate, a the previous one, c the contrapoint
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for it in 1..=tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let width = (c - b).abs();
        let xtol = tol.xtol * b.abs().max(1.0);
        let floor = 4.0 * f64::EPSILON * b.abs();
        if fb == 0.0 || (fb.abs() <= tol.ftol && width <= xtol) || width <= floor {
            let bracket = if b < c { (b, c) } else { (c, b) };
            return Ok(Root { x: b, fx: fb, bracket, iterations: it });
        }
        let m = 0.5 * (c - b);
        // minimum step; once the bracket is inside xtol but |f| is still above
        // ftol (roundoff floor), keep shrinking down to adjacent floats
        let tol1 = 0.5 * if width > xtol { xtol.max(floor) } else { floor };
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence { what: "brent", estimate: fb.abs(), target: tol.ftol })
}

/// Sign changes of f over consecutive grid points.
#[derive(Debug, Clone)]
pub struct Scan {
    pub points: Vec<(f64, f64)>,
    /// Indices i with a sign change between points[i] and points[i+1].
    pub changes: Vec<usize>,
}

impl Scan {
    pub fn first_bracket(&self) -> Option<((f64, f64), (f64, f64))> {
        self.changes.first().map(|&i| (self.points[i], self.points[i + 1]))
    }
}

pub fn scan<F>(mut f: F, grid: &[f64]) -> Result<Scan>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        points.push((x, f(x)?));
    }
    let changes = (0..points.len().saturating_sub(1))
        .filter(|&i| points[i].1.signum() != points[i + 1].1.signum() || points[i].1 == 0.0)
        .collect();
    Ok(Scan { points, changes })
}

/// Grid x0 + d·2^k, k = 0, 1, ..., up to and including the first point ≥ x_max.
pub fn doubling_grid(x0: f64, d: f64, x_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut step = d;
    loop {
        let x = (x0 + step).min(x_max);
        out.push(x);
        if x >= x_max {
            break;
        }
        step *= 2.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_on_simple_functions() {
        let tol = Tolerances { ftol: 1e-14, xtol: 1e-15, max_iter: 200 };
        let r = brent(|x| Ok(x * x - 2.0), 0.0, 2.0, -2.0, 2.0, &tol).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.bracket.0 <= r.x && r.x <= r.bracket.1);
        let r = brent(|x: f64| Ok(x.cos() - x), 0.0, 1.0, 1.0, 1f64.cos() - 1.0, &tol).unwrap();
        assert!((r.x - 0.739_085_133_215_160_6).abs() < 1e-15);
        // flat near the root: (x-1)^3
        let r = brent(|x: f64| Ok((x - 1.0).powi(3)), 0.0, 3.0, -1.0, 8.0, &Tolerances::default()).unwrap();
        assert!((r.x - 1.0).abs() < 1e-3 && r.fx.abs() < 1e-10);
        assert!(brent(Ok, 1.0, 2.0, 1.0, 2.0, &tol).is_err());
        // residual floor above ftol: the bracket collapses instead of stalling
        let noisy = |x: f64| Ok(x - 3.0 + if x > 3.0 { 1e-9 } else { -1e-9 });
        let r = brent(noisy, 0.0, 10.0, -3.0, 7.0, &Tolerances::default()).unwrap();
        assert!((r.x - 3.0).abs() < 1e-14 && r.iterations < 200);
    }

    #[test]
    fn scan_counts_changes() {
        let grid: Vec<f64> = (0..100).map(|i| 0.05 + i as f64 * 0.1).collect();
        let s = scan(|x: f64| Ok(x.sin()), &grid).unwrap();
        assert_eq!(s.changes.len(), 3);
        let g = doubling_grid(1.0, 0.5, 10.0);
        assert_eq!(g, vec![1.5, 2.0, 3.0, 5.0, 9.0, 10.0]);
    }
}
