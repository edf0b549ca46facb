use serde::Serialize;

use super::nn::PointIndex;
use super::{dist, export::TriMesh, OctagonMesh};

/// Generators of the eight-copy cell. Reflections are in x = A and y = B;
/// the rotation is the half turn about the top segment {y = 0, z = 1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transform {
    pub reflect_x: bool,
    pub reflect_y: bool,
    pub rotate: bool,
}

impl Transform {
    pub fn all() -> [Transform; 8] {
        std::array::from_fn(|k| Transform { reflect_x: k & 1 != 0, reflect_y: k & 2 != 0, rotate: k & 4 != 0 })
    }

    /// Rotation first, then the y- and x-reflections.
    pub fn apply(&self, p: [f64; 3], a: f64, b: f64) -> [f64; 3] {
        let [mut x, mut y, mut z] = p;
        if self.rotate {
            y = -y;
            z = 2.0 - z;
        }
        if self.reflect_y {
            y = 2.0 * b - y;
        }
        if self.reflect_x {
            x = 2.0 * a - x;
        }
        [x, y, z]
    }

    pub fn reverses_orientation(&self) -> bool {
        self.reflect_x != self.reflect_y
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.reflect_x {
            parts.push("sx");
        }
        if self.reflect_y {
            parts.push("sy");
        }
        if self.rotate {
            parts.push("r");
        }
        if parts.is_empty() {
            "id".into()
        } else {
            parts.join(".")
        }
    }
}

/// Eight copies of the octagon filling the box [−A,3A]×[−B,3B]×[−1,3].
///
/// The surface is invariant under the lattice spanned by (2A,0,2), (−2A,0,2)
/// and (0,4B,0): the half-turn about the top segment composed with the
/// inversion and the reflection in x = A is the translation (2A,0,2). The
/// cell is a fundamental domain of the index-2 sublattice generated by
/// (4A,0,0), (0,4B,0), (0,0,4).
#[derive(Debug, Clone)]
pub struct SymmetryCell {
    pub copies: Vec<OctagonMesh>,
    pub transforms: Vec<Transform>,
    pub lattice: [[f64; 3]; 3],
}

pub fn extend_cell(m: &OctagonMesh) -> SymmetryCell {
    let (a, b) = (m.box_dims.a, m.box_dims.b);
    let transforms = Transform::all().to_vec();
    let copies = transforms
        .iter()
        .map(|t| {
            let mut c = m.clone();
            for v in &mut c.vertices {
                *v = t.apply(*v, a, b);
            }
            if t.reverses_orientation() {
                for f in &mut c.faces {
                    f.swap(1, 2);
                }
            }
            c
        })
        .collect();
    SymmetryCell { copies, transforms, lattice: [[2.0 * a, 0.0, 2.0], [-2.0 * a, 0.0, 2.0], [0.0, 4.0 * b, 0.0]] }
}

impl SymmetryCell {
    /// All copies in one mesh; labels are prefixed with the transform.
    pub fn to_trimesh(&self) -> TriMesh {
        let mut out = TriMesh::default();
        for (c, t) in self.copies.iter().zip(&self.transforms) {
            let off = out.vertices.len();
            out.vertices.extend_from_slice(&c.vertices);
            out.faces.extend(c.faces.iter().map(|f| f.map(|v| v + off)));
            let tl = t.label();
            out.labels.extend(c.vertex_labels().into_iter().map(|l| format!("{tl}:{l}")));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellReport {
    pub copies: usize,
    /// Largest gap between copies along the arcs they share: V1V2 under the
    /// x-reflection, V6V7 under the y-reflection, V8V1 under the half turn.
    pub shared_arc_gap: f64,
    /// Largest nearest-neighbour distance between the cell translated by
    /// (2A,0,2) and the cell itself, modulo (4A,0,0), (0,4B,0), (0,0,4).
    pub translation_gap: f64,
}

pub fn check_cell(cell: &SymmetryCell) -> CellReport {
    let base = &cell.copies[0];
    let (a, b) = (base.box_dims.a, base.box_dims.b);
    let copy = |t: Transform| &cell.copies[cell.transforms.iter().position(|&u| u == t).expect("transform present")];
    let pairs = [
        (Transform { reflect_x: true, reflect_y: false, rotate: false }, 0),
        (Transform { reflect_x: false, reflect_y: true, rotate: false }, 5),
        (Transform { reflect_x: false, reflect_y: false, rotate: true }, 7),
    ];
    let mut shared_arc_gap: f64 = 0.0;
    for (t, k) in pairs {
        let other = copy(t);
        for &v in &base.boundary_arcs[k].vertices {
            shared_arc_gap = shared_arc_gap.max(dist(&base.vertices[v], &other.vertices[v]));
        }
    }

    let points: Vec<[f64; 3]> = cell.copies.iter().flat_map(|c| c.vertices.iter().copied()).collect();
    let idx = PointIndex::periodic(&points, 1e-3, [-a, -b, -1.0], [4.0 * a, 4.0 * b, 4.0]);
    let translation_gap = idx.max_nearest_distance(points.iter().map(|p| [p[0] + 2.0 * a, p[1], p[2] + 2.0]));
    CellReport { copies: cell.copies.len(), shared_arc_gap, translation_gap }
}
