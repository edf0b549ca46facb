//! Fundamental octagon of an oH (or oP) surface as a triangle mesh.
//!
//! The Weierstrass data are pulled back to the unit disk by
//! z = i(1 + w)/(1 − w) and integrated along rays from w = 0, the preimage of
//! z = i, which lands on the origin. The boundary circle carries the whole
//! real axis together with z = ∞, so no truncation of the half plane is
//! needed; the v_k become points e^{iφ_k} on the circle, where the rays end
//! in integrable inverse square-root singularities.

mod cell;
mod checks;
mod export;
mod nn;

pub use cell::{check_cell, extend_cell, CellReport, SymmetryCell, Transform};
pub use checks::{axis_deviation, check_octagon, mirror_z_residual, OctagonReport};
pub use export::{read_obj, read_points_csv, ExportFormat, TriMesh};
pub use nn::PointIndex;

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::periods::periods;
use crate::quadrature::{tanh_sinh, QuadratureSpec};
use crate::weierstrass_data::{disk, simplify, SurfaceParams};

pub const MIN_RESOLUTION: usize = 16;

/// Largest |Q| and relative ρ mismatch accepted by [`build_octagon`].
pub const PERIOD_TOL: f64 = 1e-8;

/// Per-segment absolute tolerance of the ray integrals (raw units).
const RAY_TOL: f64 = 1e-12;

/// tanh stretching of the radial and angular node spacing (radial is a
/// lower bound, raised when markers crowd together).
const RADIAL_STRETCH: f64 = 3.0;
const ANGULAR_STRETCH: f64 = 3.0;

pub const ARC_LABELS: [&str; 8] = ["V1V2", "V2V3", "V3V4", "V4V5", "V5V6", "V6V7", "V7V8", "V8V1"];
pub const MARKER_LABELS: [&str; 8] = ["V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxDims {
    pub a: f64,
    pub b: f64,
    /// x-offset of the plane containing V3V4; equals `a` once the surface closes.
    pub a_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryArc {
    pub label: &'static str,
    /// Boundary vertices from V_k to V_{k+1}, both included.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Markers {
    /// Vertex indices of V1..V8.
    pub v: [usize; 8],
    /// Image of z = i.
    pub center: usize,
}

/// Polar grid in the disk. Rays are split at the eight marker angles and at
/// 0 and π; nodes cluster toward the markers on a scale set by the distance
/// to the nearest other marker, since the Gauss map varies on that scale.
/// The first half [0, π) is laid out once and repeated on [π, 2π) through
/// φ_{k+4} = φ_k + π, so the grid is invariant under w ↦ −w (and, when
/// a = b, under w ↦ −w̄ up to rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    /// 0 = r_0 < ... < r_n = 1.
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    /// `Some(k)` on the ray ending at v_{k+1}.
    pub ray_marker: Vec<Option<usize>>,
    marker_rays: [usize; 8],
}

/// End of an angular sub-segment: a marker (plus offset) or a fixed angle.
#[derive(Debug, Clone, Copy)]
enum Anchor {
    Marker(usize, f64),
    Fixed(f64),
}

/// c sech²(c) / tanh(c): end slope of the tanh stretch, so a stretched
/// segment of length L with m nodes has end steps of about L f(c) / m.
fn end_slope(c: f64) -> f64 {
    c / (c.cosh().powi(2) * c.tanh())
}

/// Node positions in [0, 1], clustered toward the flagged ends.
fn stretch(u: f64, left: bool, right: bool, c: f64) -> f64 {
    match (left, right) {
        (true, true) => 0.5 * (1.0 + (c * (2.0 * u - 1.0)).tanh() / c.tanh()),
        (true, false) => 1.0 + (c * (u - 1.0)).tanh() / c.tanh(),
        (false, true) => (c * u).tanh() / c.tanh(),
        (false, false) => u,
    }
}

impl PolarGrid {
    pub fn new(p: &SurfaceParams, resolution: usize) -> Self {
        let phi = p.branch_points().map(disk::boundary_angle);
        // distance from each marker to its nearest neighbour on the circle
        let ell: [f64; 8] = std::array::from_fn(|k| {
            let prev = if k == 0 { phi[7] - 2.0 * PI } else { phi[k - 1] };
            let next = if k == 7 { phi[0] + 2.0 * PI } else { phi[k + 1] };
            (phi[k] - prev).min(next - phi[k])
        });
        let angle = |a: Anchor| match a {
            Anchor::Marker(k, off) => phi[k] + off,
            Anchor::Fixed(x) => x,
        };

        // sub-segments of [0, π]; long segments get extra splits at φ_k ± ℓ_k
        let ends = [
            Anchor::Fixed(0.0),
            Anchor::Marker(0, 0.0),
            Anchor::Marker(1, 0.0),
            Anchor::Marker(2, 0.0),
            Anchor::Marker(3, 0.0),
            Anchor::Fixed(PI),
        ];
        let mut subs: Vec<(Anchor, Anchor)> = Vec::new();
        for w in ends.windows(2) {
            let len = angle(w[1]) - angle(w[0]);
            let mut pts = vec![w[0]];
            if let Anchor::Marker(k, _) = w[0] {
                if ell[k] < 0.25 * len {
                    pts.push(Anchor::Marker(k, ell[k]));
                }
            }
            if let Anchor::Marker(k, _) = w[1] {
                if ell[k] < 0.25 * len {
                    pts.push(Anchor::Marker(k, -ell[k]));
                }
            }
            pts.push(w[1]);
            subs.extend(pts.windows(2).map(|q| (q[0], q[1])));
        }

        let m = (resolution / 2).max(4);
        let second_half = |a: Anchor| match a {
            Anchor::Marker(k, off) => Anchor::Marker(k + 4, off),
            Anchor::Fixed(x) => Anchor::Fixed(x + PI),
        };
        let mut angles = Vec::with_capacity(2 * subs.len() * m);
        let mut ray_marker = Vec::with_capacity(2 * subs.len() * m);
        let mut marker_rays = [0; 8];
        for half in 0..2 {
            for &(lo, hi) in &subs {
                let (lo, hi) = if half == 0 { (lo, hi) } else { (second_half(lo), second_half(hi)) };
                let is_marker = |a: Anchor| matches!(a, Anchor::Marker(_, off) if off == 0.0);
                let (cl, cr) = (is_marker(lo), is_marker(hi));
                let (x0, x1) = (angle(lo), angle(hi));
                if let Anchor::Marker(k, off) = lo {
                    if off == 0.0 {
                        marker_rays[k] = angles.len();
                    }
                }
                for l in 0..m {
                    angles.push(if l == 0 {
                        x0
                    } else {
                        x0 + (x1 - x0) * stretch(l as f64 / m as f64, cl, cr, ANGULAR_STRETCH)
                    });
                    ray_marker.push(match lo {
                        Anchor::Marker(k, off) if l == 0 && off == 0.0 => Some(k),
                        _ => None,
                    });
                }
            }
        }

        // radial end step no coarser than the angular steps next to the
        // closest pair of markers
        let n = resolution;
        let target = 2.0 * ell.iter().copied().fold(f64::INFINITY, f64::min) * end_slope(ANGULAR_STRETCH);
        let c = if end_slope(RADIAL_STRETCH) <= target {
            RADIAL_STRETCH
        } else {
            let (mut lo, mut hi) = (RADIAL_STRETCH, 4.0 * RADIAL_STRETCH);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if end_slope(mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        };
        let radii = (0..=n).map(|i| if i == n { 1.0 } else { (c * i as f64 / n as f64).tanh() / c.tanh() }).collect();
        Self { radii, angles, ray_marker, marker_rays }
    }

    pub fn n_rays(&self) -> usize {
        self.angles.len()
    }

    pub fn n_levels(&self) -> usize {
        self.radii.len() - 1
    }

    /// Ray of the marker v_{k+1}, k = 0..8.
    pub fn marker_ray(&self, k: usize) -> usize {
        self.marker_rays[k]
    }

    /// Ray through −w.
    pub fn antipodal_ray(&self, j: usize) -> usize {
        (j + self.n_rays() / 2) % self.n_rays()
    }

    /// Vertex index of level i ≥ 1 on ray j; level 0 is the single vertex 0.
    pub fn vertex(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            1 + (i - 1) * self.n_rays() + j
        }
    }

    pub fn w(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angles[j])
    }
}

#[derive(Debug, Clone)]
pub struct OctagonMesh {
    pub params: SurfaceParams,
    pub resolution: usize,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub boundary_arcs: Vec<BoundaryArc>,
    pub markers: Markers,
    pub box_dims: BoxDims,
    /// Signed per-axis factors taking Re∫ω to box units (same magnitude on
    /// all axes, so the map stays conformal).
    pub scale: [f64; 3],
    pub grid: PolarGrid,
}

impl OctagonMesh {
    /// One label per vertex: marker name, arc name, or "interior".
    pub fn vertex_labels(&self) -> Vec<String> {
        let mut labels = vec!["interior".to_string(); self.vertices.len()];
        for arc in &self.boundary_arcs {
            for &v in &arc.vertices {
                labels[v] = arc.label.to_string();
            }
        }
        for (k, &v) in self.markers.v.iter().enumerate() {
            labels[v] = MARKER_LABELS[k].to_string();
        }
        labels
    }

    pub fn to_trimesh(&self) -> TriMesh {
        TriMesh { vertices: self.vertices.clone(), faces: self.faces.clone(), labels: self.vertex_labels() }
    }
}

/// Mesh of the fundamental octagon. `p` must solve the period problem:
/// |Q| < [`PERIOD_TOL`] and ρ equal to the balancing value of the periods.
pub fn build_octagon(p: &SurfaceParams, resolution: usize) -> Result<OctagonMesh> {
    let per = periods(&simplify(p)?, &QuadratureSpec::default())?;
    let q = per.q();
    if !(q.abs() < PERIOD_TOL) {
        return Err(Error::PeriodProblem(format!("|Q| = {:e} at a = {}, b = {}, t = {}", q.abs(), p.a, p.b, p.t)));
    }
    let rho = per.rho();
    if !((p.rho - rho).abs() <= PERIOD_TOL * rho) {
        return Err(Error::PeriodProblem(format!("rho = {} but the periods balance at rho = {rho}", p.rho)));
    }
    build_octagon_unchecked(p, resolution)
}

/// As [`build_octagon`] without the period-problem precondition; the result
/// then has A ≠ A′ and fixed segments off the mid-plane.
pub fn build_octagon_unchecked(p: &SurfaceParams, resolution: usize) -> Result<OctagonMesh> {
    p.validate()?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::Domain {
            func: "build_octagon",
            msg: format!("resolution {resolution} < {MIN_RESOLUTION}"),
        });
    }
    let grid = PolarGrid::new(p, resolution);
    let rays = integrate_rays(p, &grid)?;
    let n = grid.n_levels();
    let nr = grid.n_rays();

    // height: V8V1 at z = +1; then orient x and y so that X(V1) > 0, Y(V2) < 0
    let top = rays[grid.marker_ray(0)][n - 1];
    let v2 = rays[grid.marker_ray(1)][n - 1];
    if !(top[2].is_finite() && top[2] != 0.0) {
        return Err(Error::Degenerate(format!("height of V1 is {}", top[2])));
    }
    let s = 1.0 / top[2].abs();
    let scale = [s * top[0].signum(), -s * v2[1].signum(), 1.0 / top[2]];

    let mut vertices = Vec::with_capacity(1 + n * nr);
    vertices.push([0.0; 3]);
    for i in 0..n {
        for ray in &rays {
            let x = ray[i];
            vertices.push([x[0] * scale[0], x[1] * scale[1], x[2] * scale[2]]);
        }
    }

    let mut faces = Vec::with_capacity(nr * (2 * n - 1));
    for j in 0..nr {
        faces.push([0, grid.vertex(1, j), grid.vertex(1, (j + 1) % nr)]);
    }
    for i in 1..n {
        for j in 0..nr {
            let jn = (j + 1) % nr;
            let (a, b, c, d) = (grid.vertex(i, j), grid.vertex(i, jn), grid.vertex(i + 1, jn), grid.vertex(i + 1, j));
            if dist(&vertices[a], &vertices[c]) <= dist(&vertices[b], &vertices[d]) {
                faces.push([a, d, c]);
                faces.push([a, c, b]);
            } else {
                faces.push([a, d, b]);
                faces.push([b, d, c]);
            }
        }
    }

    let boundary_arcs = (0..8)
        .map(|k| {
            let (j0, j1) = (grid.marker_ray(k), grid.marker_ray((k + 1) % 8));
            let len = (j1 + nr - j0) % nr;
            BoundaryArc { label: ARC_LABELS[k], vertices: (0..=len).map(|l| grid.vertex(n, (j0 + l) % nr)).collect() }
        })
        .collect();
    let markers = Markers { v: std::array::from_fn(|k| grid.vertex(n, grid.marker_ray(k))), center: 0 };
    let box_dims =
        BoxDims { a: vertices[markers.v[0]][0], b: -vertices[markers.v[1]][1], a_prime: vertices[markers.v[2]][0] };
    Ok(OctagonMesh { params: *p, resolution, vertices, faces, boundary_arcs, markers, box_dims, scale, grid })
}

pub(crate) fn dist(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

static WORKER_LIMIT: AtomicUsize = AtomicUsize::new(0);

/// Caps the threads used for ray integration (0 = all cores). Results do
/// not depend on it.
pub fn set_worker_limit(n: usize) {
    WORKER_LIMIT.store(n, Ordering::Relaxed);
}

/// Re∫ω from w = 0 to every node of every ray, in raw units; `out[j][i-1]`
/// belongs to level i of ray j. Rays are independent and are spread over
/// the available cores.
fn integrate_rays(p: &SurfaceParams, grid: &PolarGrid) -> Result<Vec<Vec<[f64; 3]>>> {
    let nr = grid.n_rays();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let threads = match WORKER_LIMIT.load(Ordering::Relaxed) {
        0 => cores,
        n => n,
    }
    .clamp(1, nr);
    let chunk = nr.div_ceil(threads);
    let results: Vec<Result<Vec<[f64; 3]>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..nr)
            .step_by(chunk)
            .map(|j0| {
                sc.spawn(move || (j0..(j0 + chunk).min(nr)).map(|j| integrate_ray(p, grid, j)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("ray integration thread panicked")).collect()
    });
    results.into_iter().collect()
}

fn integrate_ray(p: &SurfaceParams, grid: &PolarGrid, j: usize) -> Result<Vec<[f64; 3]>> {
    let (phi, marker) = (grid.angles[j], grid.ray_marker[j]);
    let rot = Complex64::from_polar(1.0, phi);
    let spec = QuadratureSpec::with_tol(RAY_TOL);
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    let mut out = Vec::with_capacity(grid.n_levels());
    for w in grid.radii.windows(2) {
        let (r0, r1) = (w[0], w[1]);
        // distance to the circle, exact near r = 1
        let d1 = 1.0 - r1;
        let seg = tanh_sinh(|_, _, dr: f64| disk::forms(phi, d1 + dr, p, marker).as_array(), r0, r1, &spec)?;
        for (a, v) in acc.iter_mut().zip(seg.value) {
            *a += v;
        }
        out.push(std::array::from_fn(|c| (rot * acc[c]).re));
    }
    Ok(out)
}
