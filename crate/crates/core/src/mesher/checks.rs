use serde::Serialize;

use super::nn::PointIndex;
use super::{dist, BoxDims, OctagonMesh};
use crate::error::Result;
use crate::weierstrass_data::disk;

/// Geometric invariants of a fundamental octagon, all in box units
/// (height half-extent 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OctagonReport {
    pub box_dims: BoxDims,
    /// Distance of the free arcs V1V2, V2V3, V3V4, V5V6, V6V7, V7V8 from
    /// x = A, y = −B, x = A′, x = −A, y = B, x = −A′, relative to A or B.
    pub plane_residuals: [f64; 6],
    /// |A − A′| / A.
    pub closure: f64,
    /// max |z ∓ 1| on V8V1 and V4V5.
    pub fixed_height: f64,
    /// max |y| / B on V8V1 and V4V5; zero when the segments are mid-face.
    pub fixed_offset: f64,
    /// max |X(w) + X(−w)| over vertex pairs.
    pub inversion: f64,
    /// Largest excursion of any vertex outside [−A,A]×[−B,B]×[−1,1]
    /// (with max(A, A′) in x).
    pub box_excess: f64,
    /// Largest relative mismatch between mesh edge lengths and the metric
    /// (|φ1| + |φ2|)/2 |dz| on edges with r ≤ 0.9.
    pub conformality: f64,
    /// Angle in degrees between the vertex normal and the z-axis at V2, V3, V6, V7.
    pub marker_normal_deg: [f64; 4],
    /// G vanishes exactly at V2, V6 and has poles exactly at V3, V7, and is
    /// finite and nonzero on every other boundary node.
    pub gauss_poles_at_markers: bool,
}

impl OctagonReport {
    pub fn max_plane_residual(&self) -> f64 {
        self.plane_residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn check_octagon(m: &OctagonMesh) -> Result<OctagonReport> {
    let BoxDims { a, b, a_prime } = m.box_dims;
    let arc = |k: usize| m.boundary_arcs[k].vertices.iter().map(move |&v| m.vertices[v]);
    let max_over = |k: usize, f: &dyn Fn([f64; 3]) -> f64| arc(k).map(f).fold(0.0, f64::max);

    let plane_residuals = [
        max_over(0, &|p| (p[0] - a).abs()) / a,
        max_over(1, &|p| (p[1] + b).abs()) / b,
        max_over(2, &|p| (p[0] - a_prime).abs()) / a_prime.abs(),
        max_over(4, &|p| (p[0] + a).abs()) / a,
        max_over(5, &|p| (p[1] - b).abs()) / b,
        max_over(6, &|p| (p[0] + a_prime).abs()) / a_prime.abs(),
    ];
    let fixed_height = max_over(7, &|p| (p[2] - 1.0).abs()).max(max_over(3, &|p| (p[2] + 1.0).abs()));
    let fixed_offset = max_over(7, &|p| p[1].abs()).max(max_over(3, &|p| p[1].abs())) / b;

    let g = &m.grid;
    let mut inversion: f64 = 0.0;
    for i in 1..=g.n_levels() {
        for j in 0..g.n_rays() {
            let (p, q) = (m.vertices[g.vertex(i, j)], m.vertices[g.vertex(i, g.antipodal_ray(j))]);
            inversion = inversion.max(dist(&p, &[-q[0], -q[1], -q[2]]));
        }
    }

    let ax = a.max(a_prime);
    let box_excess = m
        .vertices
        .iter()
        .map(|p| (p[0].abs() - ax).max(p[1].abs() - b).max(p[2].abs() - 1.0).max(0.0))
        .fold(0.0, f64::max);

    Ok(OctagonReport {
        box_dims: m.box_dims,
        plane_residuals,
        closure: (a - a_prime).abs() / a,
        fixed_height,
        fixed_offset,
        inversion,
        box_excess,
        conformality: conformality(m, 0.9),
        marker_normal_deg: [1, 2, 5, 6].map(|k| vertex_normal_angle(m, m.markers.v[k])),
        gauss_poles_at_markers: gauss_poles_at_markers(m),
    })
}

/// Edge length against the metric at the edge midpoint in w.
fn conformality(m: &OctagonMesh, r_max: f64) -> f64 {
    let g = &m.grid;
    let s = m.scale[2].abs();
    let mut worst: f64 = 0.0;
    let mut edge = |i0: usize, j0: usize, i1: usize, j1: usize| {
        let (w0, w1) = (g.w(i0, j0), g.w(i1, j1));
        let wm = 0.5 * (w0 + w1);
        let f = disk::forms(wm.arg(), 1.0 - wm.norm(), &m.params, None);
        let lambda = 0.5 * s * (f.phi1.norm() + f.phi2.norm());
        let len = dist(&m.vertices[g.vertex(i0, j0)], &m.vertices[g.vertex(i1, j1)]);
        worst = worst.max((len / (lambda * (w1 - w0).norm()) - 1.0).abs());
    };
    for i in 1..g.n_levels() {
        if g.radii[i + 1] > r_max {
            break;
        }
        for j in 0..g.n_rays() {
            edge(i, j, i + 1, j);
            edge(i, j, i, (j + 1) % g.n_rays());
        }
    }
    worst
}

/// Angle (degrees) between the area-weighted vertex normal and the z-axis.
fn vertex_normal_angle(m: &OctagonMesh, v: usize) -> f64 {
    let mut n = [0.0; 3];
    for f in m.faces.iter().filter(|f| f.contains(&v)) {
        let (p, q, r) = (m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
        let (u, w) = ([q[0] - p[0], q[1] - p[1], q[2] - p[2]], [r[0] - p[0], r[1] - p[1], r[2] - p[2]]);
        n[0] += u[1] * w[2] - u[2] * w[1];
        n[1] += u[2] * w[0] - u[0] * w[2];
        n[2] += u[0] * w[1] - u[1] * w[0];
    }
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    (n[2].abs() / len).min(1.0).acos().to_degrees()
}

fn gauss_poles_at_markers(m: &OctagonMesh) -> bool {
    let g = &m.grid;
    (0..g.n_rays()).all(|j| {
        let gm = disk::gauss_map(g.angles[j], 0.0, &m.params, g.ray_marker[j]).norm();
        match g.ray_marker[j] {
            Some(1) | Some(5) => gm == 0.0,
            Some(2) | Some(6) => gm.is_infinite(),
            _ => gm.is_finite() && gm > 0.0,
        }
    })
}

/// For a = b: largest horizontal distance from the z-axis on the image of the
/// positive imaginary axis (the rays φ = 0 and φ = π).
pub fn axis_deviation(m: &OctagonMesh) -> f64 {
    let g = &m.grid;
    let mut worst: f64 = 0.0;
    for j in [0, g.antipodal_ray(0)] {
        for i in 1..=g.n_levels() {
            let p = m.vertices[g.vertex(i, j)];
            worst = worst.max(p[0].hypot(p[1]));
        }
    }
    worst
}

/// Point-set distance between `points` and their mirror image in z = 0.
pub fn mirror_z_residual(points: &[[f64; 3]]) -> f64 {
    let idx = PointIndex::new(points, 1e-3);
    idx.max_nearest_distance(points.iter().map(|p| [p[0], p[1], -p[2]]))
}
