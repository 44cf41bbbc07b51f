//! Conforming triangle meshes of a [`PolygonQuad`](crate::geometry::PolygonQuad)
//! with boundary edges labelled by arc, plus newest-vertex bisection.
//!
//! Text dump format written by [`TriMesh::dump_text`]:
//!
//! ```text
//! m t b
//! x y            (m lines)
//! i j k          (t lines, counter-clockwise, refinement edge is (j, k))
//! i j arc        (b lines, arc in 1..=4, boundary traversed counter-clockwise)
//! ```

mod bisect;
mod triangulate;

use std::collections::HashMap;
use std::fmt::Write as _;

pub use bisect::{bisect, bisect_with_data};
pub(crate) use bisect::bisect_with_edges;
pub use triangulate::{triangulate, MIN_ANGLE_DEG};

use crate::error::{Error, Result};
use crate::geometry::{orient, Arc, Point};
use crate::scalar::Scalar;

/// A labelled boundary edge, oriented so the domain lies on its left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub arc: Arc,
}

/// Conforming triangulation.
///
/// Each triangle is stored counter-clockwise and rotated so that its
/// refinement edge is the one opposite local vertex 0, i.e. `(t[1], t[2])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh<T> {
    vertices: Vec<Point<T>>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl<T: Scalar> TriMesh<T> {
    /// Builds a mesh from raw parts and checks every structural invariant.
    ///
    /// `triangles` must be counter-clockwise with the refinement edge opposite
    /// local vertex 0.
    pub fn from_parts(
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mesh = Self { vertices, triangles, boundary_edges };
        mesh.audit()?;
        Ok(mesh)
    }

    pub(crate) fn from_parts_unchecked(
        vertices: Vec<Point<T>>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Self {
        Self { vertices, triangles, boundary_edges }
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Local index of the refinement edge of triangle `t` (edge opposite that
    /// local vertex). Always 0 by storage convention.
    pub fn refinement_edge(&self, _t: usize) -> usize {
        0
    }

    pub fn corners(&self, t: usize) -> [Point<T>; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> T {
        let [a, b, c] = self.corners(t);
        orient(a, b, c) * T::lit(0.5)
    }

    /// Sum of triangle areas in index order.
    pub fn area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Smallest interior angle of triangle `t`, in degrees.
    pub fn triangle_min_angle_deg(&self, t: usize) -> T {
        let [a, b, c] = self.corners(t);
        min_angle(a, b, c).to_degrees()
    }

    pub fn min_angle_deg(&self) -> T {
        (0..self.triangles.len())
            .map(|t| self.triangle_min_angle_deg(t))
            .fold(T::infinity(), T::min)
    }

    pub fn max_triangle_area(&self) -> T {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).fold(T::zero(), T::max)
    }

    /// Arc label of every vertex on the boundary; corner vertices carry both
    /// adjacent labels.
    pub fn vertex_arcs(&self) -> Vec<[bool; 4]> {
        let mut on = vec![[false; 4]; self.vertices.len()];
        for e in &self.boundary_edges {
            for &v in &e.v {
                on[v][e.arc.index()] = true;
            }
        }
        on
    }

    /// Checks orientation, conformity and boundary labelling.
    pub fn audit(&self) -> Result<()> {
        let nv = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            if !(self.triangle_area(t) > T::zero()) {
                return Err(Error::Mesh(format!("triangle {t} is not positively oriented")));
            }
        }
        // directed edge -> count; a conforming mesh has every undirected edge
        // either matched by its reverse or on the boundary
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                *directed.entry((tri[(k + 1) % 3], tri[(k + 2) % 3])).or_default() += 1;
            }
        }
        if let Some((e, _)) = directed.iter().find(|(_, &c)| c > 1) {
            return Err(Error::Mesh(format!("edge {e:?} used twice with the same orientation")));
        }
        let mut boundary: HashMap<(usize, usize), Arc> = HashMap::new();
        for be in &self.boundary_edges {
            if boundary.insert((be.v[0], be.v[1]), be.arc).is_some() {
                return Err(Error::Mesh(format!("duplicate boundary edge {:?}", be.v)));
            }
        }
        for &(a, b) in directed.keys() {
            let has_twin = directed.contains_key(&(b, a));
            let is_boundary = boundary.contains_key(&(a, b));
            if has_twin == is_boundary {
                return Err(Error::Mesh(if has_twin {
                    format!("interior edge ({a}, {b}) labelled as boundary")
                } else {
                    format!("edge ({a}, {b}) has one triangle but no boundary label (hanging node?)")
                }));
            }
        }
        if boundary.keys().any(|e| !directed.contains_key(e)) {
            return Err(Error::Mesh("boundary edge not adjacent to any triangle".into()));
        }
        // boundary edges chain into a single loop whose labels change only
        // where a new arc starts
        let next: HashMap<usize, (usize, Arc)> = self.boundary_edges.iter().map(|e| (e.v[0], (e.v[1], e.arc))).collect();
        if next.len() != self.boundary_edges.len() {
            return Err(Error::Mesh("boundary vertex with two outgoing edges".into()));
        }
        let Some(start) = self.boundary_edges.iter().find(|e| e.arc == Arc::Gamma1).map(|e| e.v[0]) else {
            return Err(Error::Mesh("no γ1 boundary edge".into()));
        };
        // rewind to the first γ1 edge
        let prev: HashMap<usize, (usize, Arc)> = self.boundary_edges.iter().map(|e| (e.v[1], (e.v[0], e.arc))).collect();
        let mut first = start;
        for _ in 0..self.boundary_edges.len() {
            match prev.get(&first) {
                Some(&(p, Arc::Gamma1)) => first = p,
                _ => break,
            }
        }
        let mut v = first;
        let mut label_changes = 0;
        let mut current = Arc::Gamma1;
        for _ in 0..self.boundary_edges.len() {
            let (w, arc) = next[&v];
            if arc != current {
                if arc.index() != current.index() + 1 {
                    return Err(Error::Mesh(format!("arc labels out of order at vertex {v}")));
                }
                label_changes += 1;
                current = arc;
            }
            v = w;
        }
        if v != first || label_changes != 3 {
            return Err(Error::Mesh("boundary does not form one loop with four arcs".into()));
        }
        Ok(())
    }

    /// Plain-text dump (format in the module docs).
    pub fn dump_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.vertices.len(), self.triangles.len(), self.boundary_edges.len());
        for p in &self.vertices {
            let _ = writeln!(out, "{:e} {:e}", p.x.as_f64(), p.y.as_f64());
        }
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        for e in &self.boundary_edges {
            let _ = writeln!(out, "{} {} {}", e.v[0], e.v[1], e.arc.index() + 1);
        }
        out
    }
}

/// Marker for a missing triangle or vertex index.
pub(crate) const NONE: usize = usize::MAX;

/// Undirected edges of a triangle list, numbered in sorted `(min, max)`
/// order so the numbering is independent of hashing.
pub(crate) struct EdgeTable {
    pub(crate) keys: Vec<(usize, usize)>,
    /// edge ids per triangle, entry `k` is the edge opposite local vertex `k`
    pub(crate) of_tri: Vec<[usize; 3]>,
    pub(crate) tris: Vec<[usize; 2]>,
}

impl EdgeTable {
    pub(crate) fn build(tris: &[[usize; 3]]) -> Self {
        let mut all: Vec<(usize, usize, usize, usize)> = Vec::with_capacity(3 * tris.len());
        for (t, tri) in tris.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                all.push((a.min(b), a.max(b), t, k));
            }
        }
        all.sort_unstable();
        let mut keys = Vec::with_capacity(all.len() / 2 + 4);
        let mut of_tri = vec![[NONE; 3]; tris.len()];
        let mut adj: Vec<[usize; 2]> = Vec::with_capacity(all.len() / 2 + 4);
        for &(a, b, t, k) in &all {
            if keys.last() != Some(&(a, b)) {
                keys.push((a, b));
                adj.push([t, NONE]);
            } else {
                adj.last_mut().expect("pushed above")[1] = t;
            }
            of_tri[t][k] = keys.len() - 1;
        }
        Self { keys, of_tri, tris: adj }
    }

    pub(crate) fn find(&self, a: usize, b: usize) -> Option<usize> {
        self.keys.binary_search(&(a.min(b), a.max(b))).ok()
    }
}

/// Smallest angle of a triangle, in radians.
pub(crate) fn min_angle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    let ab = b.sub(a);
    let bc = c.sub(b);
    let ca = a.sub(c);
    let angle = |u: Point<T>, v: Point<T>| u.cross(v).abs().atan2(-u.dot(v));
    angle(ca, ab).min(angle(ab, bc)).min(angle(bc, ca))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TriMesh<f64> {
        let v = vec![Point::new(1.0, 1.0), Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        // diagonal (0, 2) is the refinement edge of both halves
        let tris = vec![[1, 2, 0], [3, 0, 2]];
        let be = [(0, 1, Arc::Gamma1), (1, 2, Arc::Gamma2), (2, 3, Arc::Gamma3), (3, 0, Arc::Gamma4)]
            .map(|(a, b, arc)| BoundaryEdge { v: [a, b], arc })
            .to_vec();
        TriMesh::from_parts(v, tris, be).unwrap()
    }

    #[test]
    fn two_triangle_square_is_valid() {
        let m = square();
        assert_eq!(m.area(), 1.0);
        assert!((m.min_angle_deg() - 45.0).abs() < 1e-12);
        let arcs = m.vertex_arcs();
        assert_eq!(arcs[1], [true, true, false, false]);
    }

    #[test]
    fn audit_catches_defects() {
        let m = square();
        let mut flipped = m.triangles().to_vec();
        flipped[0] = [1, 0, 2];
        assert!(TriMesh::from_parts(m.vertices().to_vec(), flipped, m.boundary_edges().to_vec()).is_err());

        let mut missing = m.boundary_edges().to_vec();
        missing.pop();
        assert!(TriMesh::from_parts(m.vertices().to_vec(), m.triangles().to_vec(), missing).is_err());

        let mut relabelled = m.boundary_edges().to_vec();
        relabelled[2].arc = Arc::Gamma2;
        assert!(TriMesh::from_parts(m.vertices().to_vec(), m.triangles().to_vec(), relabelled).is_err());
    }

    #[test]
    fn dump_has_expected_layout() {
        let text = square().dump_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "4 2 4");
        assert_eq!(lines.len(), 1 + 4 + 2 + 4);
        assert_eq!(lines[5], "1 2 0");
        assert_eq!(lines[10], "3 0 4");
    }
}
