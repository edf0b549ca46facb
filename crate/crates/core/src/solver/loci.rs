use serde::Serialize;
use std::io::Write;

use super::roots::{brent, doubling_grid, scan, Root, Tolerances};
use crate::error::{Error, Result};
use crate::periods::{intersection_residual, q, q_parts, qtilde, traizet_residual};
use crate::quadrature::{tanh_sinh, QuadratureSpec};
use crate::special_fn::{ell_e, ell_k};
use crate::weierstrass_data::{simplify, z_of, SimplifiedParams, SurfaceParams};

/// Upper end of the τ (or t) search.
pub const T_MAX: f64 = 1e6;

/// One solved point of a one-parameter locus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocusPoint {
    /// The prescribed parameter (b, α or β depending on the locus).
    pub primary_param: f64,
    /// The solved parameter (t or τ).
    pub solved_param: f64,
    /// |residual| of the defining equation at the solution.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Sign changes seen on the search grid (1 when the root is isolated there).
    pub sign_changes: usize,
}

fn locus_point(primary: f64, root: Root, sign_changes: usize) -> LocusPoint {
    LocusPoint {
        primary_param: primary,
        solved_param: root.x,
        residual: root.fx.abs(),
        bracket: root.bracket,
        iterations: root.iterations,
        sign_changes,
    }
}

/// Locus rows as CSV with 17 significant digits. `names` are the column
/// names of the prescribed and solved parameters; `header` lines become `#`
/// comments.
pub fn write_locus_csv<W: Write>(w: &mut W, header: &[String], names: (&str, &str), rows: &[LocusPoint]) -> Result<()> {
    for h in header {
        writeln!(w, "# {h}")?;
    }
    writeln!(w, "{},{},residual,bracket_lo,bracket_hi,iterations,sign_changes", names.0, names.1)?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            r.primary_param, r.solved_param, r.residual, r.bracket.0, r.bracket.1, r.iterations, r.sign_changes
        )?;
    }
    Ok(())
}

/// Scans `grid`, then refines the first sign change.
fn scan_solve<F>(mut f: F, grid: &[f64], tol: &Tolerances, what: &str) -> Result<(Root, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let s = scan(&mut f, grid)?;
    let ((a, fa), (b, fb)) = s.first_bracket().ok_or_else(|| {
        Error::NoBracket(format!("{what}: no sign change on [{}, {}]", grid[0], grid[grid.len() - 1]))
    })?;
    let root = brent(&mut f, a, b, fa, fb, tol)?;
    Ok((root, s.changes.len()))
}

/// Q(a, b; t) in the original parameters.
pub fn q_of_t(a: f64, b: f64, t: f64) -> Result<f64> {
    q(&simplify(&SurfaceParams::new(a, b, t, 1.0)?)?)
}

/// t solving the period problem for given a ≠ b.
pub fn solve_t(a: f64, b: f64) -> Result<LocusPoint> {
    if !(a > 0.0 && b > 0.0 && 1.0 / a < b) {
        return Err(Error::Ordering(format!("need 1/a < b, got a = {a}, b = {b}")));
    }
    if (a - b).abs() <= 1e-12 * b {
        return Err(Error::Degenerate("a = b: every t solves the period problem".into()));
    }
    // t must exceed both a and b
    let base = a.max(b);
    let grid = doubling_grid(base, 1e-3 * base, T_MAX);
    let tol = Tolerances::default();
    let (root, n) = scan_solve(|t| q_of_t(a, b, t), &grid, &tol, "solve_t")?;
    Ok(locus_point(b, root, n))
}

/// τ > α on the intersection of the oH closure with oP (α = β).
pub fn intersection_locus(alpha: f64) -> Result<LocusPoint> {
    if !(alpha > 0.0) {
        return Err(Error::Domain { func: "intersection_locus", msg: format!("alpha = {alpha} must be positive") });
    }
    // the equation also vanishes trivially as τ → α+, so start clear of it
    let grid = doubling_grid(alpha, 1e-3 * alpha.max(1.0), T_MAX);
    let tol = Tolerances { ftol: 1e-13, ..Tolerances::default() };
    let (root, n) = scan_solve(|tau| intersection_residual(alpha, tau), &grid, &tol, "intersection_locus")?;
    Ok(locus_point(alpha, root, n))
}

/// τ > β on the Traizet limit locus.
pub fn traizet_locus(beta: f64) -> Result<LocusPoint> {
    if !(beta > 0.0) {
        return Err(Error::Domain { func: "traizet_locus", msg: format!("beta = {beta} must be positive") });
    }
    let grid = doubling_grid(beta, 1e-6 * beta.max(1.0), T_MAX);
    let tol = Tolerances { ftol: 1e-13, ..Tolerances::default() };
    let (root, n) = scan_solve(|tau| traizet_residual(beta, tau), &grid, &tol, "traizet_locus")?;
    Ok(locus_point(beta, root, n))
}

/// Root τ(β) of Q(ε − β, β; τ) = 0 along the line α + β = ε, for β samples
/// spread uniformly over [ε/2, β_max]. At β = ε/2 the closed diagonal form
/// takes over.
pub fn isosum_curve(epsilon: f64, n_points: usize, beta_max: f64) -> Vec<Result<LocusPoint>> {
    let start = 0.5 * epsilon;
    (0..n_points)
        .map(|k| {
            let beta =
                if n_points == 1 { start } else { start + (beta_max - start) * k as f64 / (n_points - 1) as f64 };
            isosum_point(epsilon, beta)
        })
        .collect()
}

/// Cap of the adaptive β range; the roots τ(β) grow like β² and leave the
/// τ search range near this value.
pub const ISOSUM_BETA_CAP: f64 = 1e3;

/// Largest β (up to [`ISOSUM_BETA_CAP`]) such that every sample up to it
/// still brackets and solves: β doubles from ε until a solve fails, then the
/// failure boundary is bisected.
pub fn isosum_beta_max(epsilon: f64) -> Result<f64> {
    let ok = |beta: f64| isosum_point(epsilon, beta).is_ok();
    let mut good = 0.5 * epsilon;
    if !ok(good) {
        return Err(Error::NoBracket(format!("isosum_curve: no root at beta = eps/2 = {good}")));
    }
    let mut beta = epsilon.max(0.5 * epsilon + 1e-3);
    while beta < ISOSUM_BETA_CAP && ok(beta) {
        good = beta;
        beta *= 2.0;
    }
    if beta >= ISOSUM_BETA_CAP {
        if ok(ISOSUM_BETA_CAP) {
            return Ok(ISOSUM_BETA_CAP);
        }
        beta = ISOSUM_BETA_CAP;
    }
    let mut bad = beta;
    for _ in 0..30 {
        let mid = 0.5 * (good + bad);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

pub fn isosum_point(epsilon: f64, beta: f64) -> Result<LocusPoint> {
    if !(epsilon > 0.0 && beta >= 0.5 * epsilon) {
        return Err(Error::Domain {
            func: "isosum_point",
            msg: format!("need eps > 0, beta >= eps/2 (eps = {epsilon}, beta = {beta})"),
        });
    }
    let alpha = epsilon - beta;
    let grid = doubling_grid(beta, 1e-3 * beta.max(1.0), T_MAX);
    let tol = Tolerances::default();
    let f = |tau: f64| qtilde(&SimplifiedParams::new(alpha, beta, tau)?);
    let (root, n) = scan_solve(f, &grid, &tol, "isosum_curve")?;
    // residual of Q itself at the root, relative to the two quotients it
    // is the difference of (they grow like τ)
    let mut p = locus_point(beta, root, n);
    if (beta - alpha).abs() >= crate::periods::DEGENERATE_GUARD {
        let (qi, qj) = q_parts(&SimplifiedParams::new(alpha, beta, root.x)?)?;
        p.residual = (qi - qj).abs() / qi.abs().max(qj.abs()).max(1.0);
    }
    Ok(p)
}

/// θ = 2 arctan(K(1−m)/K(m)), m = τ²/(τ²+4): angle of the limit rhombic torus.
pub fn rhombic_angle(tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain { func: "rhombic_angle", msg: format!("tau = {tau} must be positive") });
    }
    let t2 = tau * tau;
    let (m, mc) = (t2 / (t2 + 4.0), 4.0 / (t2 + 4.0));
    Ok(2.0 * (ell_k(mc)? / ell_k(m)?).atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagicRoot {
    pub m: f64,
    pub tau: f64,
    pub t: f64,
    pub residual: f64,
}

/// Root of 2E(m) = K(m), expressed through m = τ²/(τ²+4).
pub fn magic_tau() -> Result<MagicRoot> {
    let f = |m: f64| Ok(2.0 * ell_e(m)? - ell_k(m)?);
    let (a, b) = (0.01, 0.99);
    let tol = Tolerances { ftol: 1e-15, xtol: 1e-15, max_iter: 200 };
    let r = brent(f, a, b, f(a)?, f(b)?, &tol)?;
    let tau = 2.0 * (r.x / (1.0 - r.x)).sqrt();
    Ok(MagicRoot { m: r.x, tau, t: z_of(tau), residual: r.fx.abs() })
}

/// Height fraction |∫_b^t dh| / |∫_{1/t}^t dh| along the degenerate axis:
/// where the singular point at b sits between the two levels. In ζ the
/// interval (1/t, t) becomes (−τ, τ) and dh = i dζ/√((ζ²−τ²)(ζ²+4)), which
/// is even in ζ.
pub fn height_fraction(beta: f64, tau: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta < tau) {
        return Err(Error::Domain {
            func: "height_fraction",
            msg: format!("need 0 <= beta < tau (beta = {beta}, tau = {tau})"),
        });
    }
    let spec = QuadratureSpec::with_tol(1e-14);
    let piece = |lo: f64| {
        tanh_sinh(
            |_, dl: f64, dr: f64| {
                let zeta = if dl < dr { lo + dl } else { tau - dr };
                1.0 / (dr * (tau + lo + dl) * (zeta * zeta + 4.0)).sqrt()
            },
            lo,
            tau,
            &spec,
        )
        .map(|r| r.value)
    };
    Ok(piece(beta)? / (2.0 * piece(0.0)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn magic_root_and_angles() {
        let r = magic_tau().unwrap();
        assert!((r.tau - 4.35932).abs() < 1e-4 && (r.t - 4.57777).abs() < 1e-4);
        assert!((rhombic_angle(2.0).unwrap() - PI / 2.0).abs() < 1e-14);
        let t60 = 2.0 * (2.0 + 3f64.sqrt());
        assert!((rhombic_angle(t60).unwrap() - PI / 3.0).abs() < 1e-12);
        assert!((rhombic_angle(r.tau).unwrap() - 1.23409).abs() < 1e-5);
        // 2E − K changes sign once on (0, 1)
        let grid: Vec<f64> = (1..1000).map(|i| i as f64 / 1000.0).collect();
        let s = scan(|m| Ok(2.0 * ell_e(m)? - ell_k(m)?), &grid).unwrap();
        assert_eq!(s.changes.len(), 1);
    }

    #[test]
    fn traizet_and_intersection_endpoints() {
        let p = traizet_locus(2.0).unwrap();
        assert!((p.solved_param - 2.0 * (2.0 + 3f64.sqrt())).abs() < 1e-8, "{p:?}");
        let magic = magic_tau().unwrap().tau;
        assert!((traizet_locus(1e-4).unwrap().solved_param - magic).abs() < 1e-3);
        let p = intersection_locus(1e-4).unwrap();
        assert!((p.solved_param - magic).abs() < 1e-3, "{p:?}");
        let p = intersection_locus(1.0).unwrap();
        assert!(p.solved_param > 1.0 && p.residual < 1e-12 && p.sign_changes == 1);
    }

    #[test]
    fn height_fraction_at_sixty_degrees() {
        let h = height_fraction(2.0, 2.0 * (2.0 + 3f64.sqrt())).unwrap();
        assert!((h - 1.0 / 3.0).abs() < 1e-6, "{h}");
        assert!((height_fraction(0.0, 3.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn solve_t_finds_isolated_root() {
        let p = solve_t(1.2, 1.5).unwrap();
        assert!(p.residual < 1e-10 && p.sign_changes == 1 && p.solved_param > 1.5);
        assert!(q_of_t(1.2, 1.5, p.solved_param).unwrap().abs() < 1e-10);
        assert!(matches!(solve_t(1.5, 1.5), Err(Error::Degenerate(_))));
        assert!(solve_t(0.5, 1.5).is_err());
    }

    #[test]
    fn isosum_beta_range_is_adaptive() {
        assert_eq!(isosum_beta_max(0.1).unwrap(), ISOSUM_BETA_CAP);
        let bmax = isosum_beta_max(0.01).unwrap();
        assert!(bmax > 100.0 && bmax < ISOSUM_BETA_CAP, "{bmax}");
        assert!(isosum_point(0.01, bmax).is_ok());
    }

    #[test]
    fn isosum_starts_on_the_diagonal() {
        let eps = 0.4;
        let pts = isosum_curve(eps, 3, 1.0);
        let first = pts[0].as_ref().unwrap();
        let diag = intersection_locus(0.2).unwrap();
        assert!((first.solved_param - diag.solved_param).abs() < 1e-6);
        for p in &pts {
            assert!(p.as_ref().unwrap().residual < 1e-10);
        }
    }
}
