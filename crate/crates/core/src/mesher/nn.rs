use std::collections::HashMap;

use super::dist;

/// Uniform-grid point index for nearest-neighbour queries within one cell
/// width, optionally on a rectangular torus.
#[derive(Debug, Clone)]
pub struct PointIndex {
    points: Vec<[f64; 3]>,
    cell: f64,
    origin: [f64; 3],
    /// Periods of the torus; `None` for plain R³.
    period: Option<[f64; 3]>,
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl PointIndex {
    pub fn new(points: &[[f64; 3]], cell: f64) -> Self {
        Self::build(points, cell, [0.0; 3], None)
    }

    /// Points are taken modulo the lattice of `period` with the fundamental
    /// box starting at `origin`.
    pub fn periodic(points: &[[f64; 3]], cell: f64, origin: [f64; 3], period: [f64; 3]) -> Self {
        Self::build(points, cell, origin, Some(period))
    }

    fn build(points: &[[f64; 3]], cell: f64, origin: [f64; 3], period: Option<[f64; 3]>) -> Self {
        let mut idx = Self { points: Vec::with_capacity(points.len()), cell, origin, period, buckets: HashMap::new() };
        for p in points {
            let p = idx.wrap(*p);
            idx.buckets.entry(idx.key(&p)).or_default().push(idx.points.len());
            idx.points.push(p);
        }
        idx
    }

    fn wrap(&self, p: [f64; 3]) -> [f64; 3] {
        match self.period {
            None => p,
            Some(per) => std::array::from_fn(|c| self.origin[c] + (p[c] - self.origin[c]).rem_euclid(per[c])),
        }
    }

    fn key(&self, p: &[f64; 3]) -> [i64; 3] {
        std::array::from_fn(|c| ((p[c] - self.origin[c]) / self.cell).floor() as i64)
    }

    /// Distance from `q` to the nearest indexed point, or infinity when no
    /// point lies within one cell width.
    pub fn nearest_distance(&self, q: [f64; 3]) -> f64 {
        let q = self.wrap(q);
        let mut best = f64::INFINITY;
        // periodic images are needed only next to the box faces
        let shifts = |c: usize| -> Vec<f64> {
            match self.period {
                None => vec![0.0],
                Some(per) => {
                    let mut s = vec![0.0];
                    if q[c] - self.origin[c] < self.cell {
                        s.push(per[c]);
                    }
                    if self.origin[c] + per[c] - q[c] < self.cell {
                        s.push(-per[c]);
                    }
                    s
                }
            }
        };
        for sx in shifts(0) {
            for sy in shifts(1) {
                for sz in shifts(2) {
                    let qi = [q[0] + sx, q[1] + sy, q[2] + sz];
                    let k = self.key(&qi);
                    for dx in -1..=1 {
                        for dy in -1..=1 {
                            for dz in -1..=1 {
                                if let Some(b) = self.buckets.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                                    for &i in b {
                                        best = best.min(dist(&self.points[i], &qi));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if best <= self.cell {
            best
        } else {
            f64::INFINITY
        }
    }

    /// Largest nearest-neighbour distance over `queries`.
    pub fn max_nearest_distance(&self, queries: impl IntoIterator<Item = [f64; 3]>) -> f64 {
        queries.into_iter().map(|q| self.nearest_distance(q)).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_neighbours_and_wraps() {
        let pts = [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.5, 0.25, 0.75]];
        let idx = PointIndex::new(&pts, 0.1);
        assert!((idx.nearest_distance([0.5, 0.25, 0.8]) - 0.05).abs() < 1e-15);
        assert!(idx.nearest_distance([0.3, 0.3, 0.3]).is_infinite());
        let per = PointIndex::periodic(&pts, 0.1, [0.0; 3], [2.0, 2.0, 2.0]);
        assert!((per.nearest_distance([1.99, 0.0, 0.0]) - 0.01).abs() < 1e-14);
        assert!((per.nearest_distance([-1.0, 3.0, 1.02]) - 0.02).abs() < 1e-14);
    }
}
