use std::sync::OnceLock;

use tpms_oh::mesher::*;
use tpms_oh::periods::solve_rho;
use tpms_oh::solver::solve_t;
use tpms_oh::weierstrass_data::{simplify, SurfaceParams};
use tpms_oh::Error;

fn op_mesh() -> &'static OctagonMesh {
    static M: OnceLock<OctagonMesh> = OnceLock::new();
    M.get_or_init(|| build_octagon(&SurfaceParams::new(1.5, 1.5, 3.0, 1.0).unwrap(), 64).unwrap())
}

fn solved(a: f64, b: f64) -> SurfaceParams {
    let t = solve_t(a, b).unwrap().solved_param;
    let mut p = SurfaceParams::new(a, b, t, 1.0).unwrap();
    p.rho = solve_rho(&simplify(&p).unwrap()).unwrap();
    p
}

fn oh_mesh() -> &'static OctagonMesh {
    static M: OnceLock<OctagonMesh> = OnceLock::new();
    M.get_or_init(|| build_octagon(&solved(1.2, 1.5), 64).unwrap())
}

fn assert_octagon(r: &OctagonReport) {
    assert!(r.max_plane_residual() < 1e-6, "{r:?}");
    assert!(r.closure < 1e-6, "{r:?}");
    assert!(r.fixed_height < 1e-6 && r.fixed_offset < 1e-6, "{r:?}");
    assert!(r.inversion < 1e-6 && r.box_excess < 1e-6, "{r:?}");
    assert!(r.gauss_poles_at_markers, "{r:?}");
    assert!(r.marker_normal_deg.iter().all(|&d| d < 5.0), "{r:?}");
}

#[test]
fn op_octagon_invariants() {
    let m = op_mesh();
    assert_octagon(&check_octagon(m).unwrap());
    // the imaginary axis maps to the vertical segment through the origin
    assert!(axis_deviation(m) < 1e-6);
    assert!(mirror_z_residual(&m.vertices) < 1e-6);
}

#[test]
fn oh_octagon_invariants() {
    let m = oh_mesh();
    let r = check_octagon(m).unwrap();
    assert_octagon(&r);
    assert!(r.box_dims.a > 0.0 && r.box_dims.b > 0.0);
    // a ≠ b breaks the z-mirror
    assert!(mirror_z_residual(&m.vertices) > 1e-3);
}

#[test]
fn unsolved_parameters_do_not_close() {
    let p = SurfaceParams::new(1.2, 1.5, 3.0, 1.0).unwrap();
    assert!(matches!(build_octagon(&p, 32), Err(Error::PeriodProblem(_))));
    let mut q = solved(1.2, 1.5);
    q.rho *= 1.01;
    assert!(matches!(build_octagon(&q, 32), Err(Error::PeriodProblem(_))));
    // off the solution the free arcs stay planar but A ≠ A′ or the segments
    // leave the mid-plane
    let r = check_octagon(&build_octagon_unchecked(&p, 32).unwrap()).unwrap();
    assert!(r.max_plane_residual() < 1e-6 && r.inversion < 1e-6);
    assert!(r.closure.max(r.fixed_offset) > 1e-3, "{r:?}");
    assert!(build_octagon(&SurfaceParams::new(1.5, 1.5, 3.0, 1.0).unwrap(), 8).is_err());
}

#[test]
fn discrete_quantities_converge() {
    let p = solved(1.2, 1.5);
    let coarse = check_octagon(&build_octagon(&p, 32).unwrap()).unwrap();
    let fine = check_octagon(oh_mesh()).unwrap();
    assert!(fine.conformality < 0.5 * coarse.conformality, "{} {}", coarse.conformality, fine.conformality);
    for k in 0..4 {
        assert!(fine.marker_normal_deg[k] < coarse.marker_normal_deg[k]);
    }
    // box dimensions are resolution independent up to quadrature error
    assert!((fine.box_dims.a - coarse.box_dims.a).abs() < 1e-10);
    assert!((fine.box_dims.b - coarse.box_dims.b).abs() < 1e-10);
}

#[test]
fn near_neck_octagon_keeps_vertical_normals() {
    // α + β = 0.05
    let a = 1.0126;
    let m = build_octagon(&SurfaceParams::new(a, a, 3.0, 1.0).unwrap(), 64).unwrap();
    assert_octagon(&check_octagon(&m).unwrap());
}

#[test]
fn symmetry_cell() {
    for m in [op_mesh(), oh_mesh()] {
        let cell = extend_cell(m);
        let r = check_cell(&cell);
        assert_eq!(r.copies, 8);
        assert!(r.shared_arc_gap < 1e-8 && r.translation_gap < 1e-8, "{r:?}");
        let (a, b) = (m.box_dims.a, m.box_dims.b);
        assert_eq!(cell.lattice, [[2.0 * a, 0.0, 2.0], [-2.0 * a, 0.0, 2.0], [0.0, 4.0 * b, 0.0]]);
    }
}

fn triangle_area(m: &TriMesh, f: &[usize; 3]) -> f64 {
    let (p, q, r) = (m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]);
    let u = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
    let w = [r[0] - p[0], r[1] - p[1], r[2] - p[2]];
    let c = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]];
    0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tm = op_mesh().to_trimesh();
    assert!(tm.faces.iter().all(|f| triangle_area(&tm, f) > 0.0));
    let (obj, csv) = (dir.path().join("op.obj"), dir.path().join("op.csv"));
    tm.export(ExportFormat::Obj, &obj, &["a=1.5 b=1.5 t=3".into()]).unwrap();
    tm.export(ExportFormat::CsvPoints, &csv, &[]).unwrap();
    let back = read_obj(&obj).unwrap();
    assert_eq!(back.vertices.len(), tm.vertices.len());
    assert_eq!(back.faces, tm.faces);
    let pts = read_points_csv(&csv).unwrap();
    assert_eq!(pts.vertices.len(), tm.vertices.len());
    assert_eq!(pts.labels.iter().filter(|l| l.len() == 2).count(), 8);
    assert!(mirror_z_residual(&pts.vertices) < 1e-6);

    let cell = extend_cell(oh_mesh()).to_trimesh();
    assert_eq!(cell.vertices.len(), 8 * oh_mesh().vertices.len());
    assert!(cell.faces.iter().all(|f| triangle_area(&cell, f) > 0.0));
    let path = dir.path().join("cell.obj");
    cell.export(ExportFormat::Obj, &path, &[]).unwrap();
    assert_eq!(read_obj(&path).unwrap().vertices.len(), cell.vertices.len());
}
