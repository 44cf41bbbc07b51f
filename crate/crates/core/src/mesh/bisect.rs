//! Newest-vertex bisection with conformity closure.
//!
//! Marking works on edges: a marked triangle marks its refinement edge, and
//! any triangle with a marked edge must also mark its own refinement edge.
//! At the fixpoint every marked edge is split from both sides, so the result
//! has no hanging nodes. A triangle is then cut through its refinement edge,
//! and each child whose refinement edge (an edge of the parent) is marked is
//! cut once more.

use super::{BoundaryEdge, EdgeTable, TriMesh, NONE};
use crate::scalar::Scalar;

/// Refines `mesh` so every triangle in `marked` is bisected at least once.
pub fn bisect<T: Scalar>(mesh: &TriMesh<T>, marked: &[usize]) -> TriMesh<T> {
    bisect_with_data(mesh, marked, &[]).0
}

/// Like [`bisect`], also carrying nodal vectors to the refined mesh by linear
/// interpolation (a new midpoint gets the mean of the edge's end values).
pub fn bisect_with_data<T: Scalar>(mesh: &TriMesh<T>, marked: &[usize], fields: &[&[T]]) -> (TriMesh<T>, Vec<Vec<T>>) {
    bisect_with_edges(mesh, &EdgeTable::build(mesh.triangles()), marked, fields)
}

pub(crate) fn bisect_with_edges<T: Scalar>(
    mesh: &TriMesh<T>,
    edges: &EdgeTable,
    marked: &[usize],
    fields: &[&[T]],
) -> (TriMesh<T>, Vec<Vec<T>>) {
    let tris = mesh.triangles();

    let mut split = vec![false; edges.keys.len()];
    let mut stack: Vec<usize> = Vec::new();
    for &t in marked.iter().filter(|&&t| t < tris.len()) {
        let e = edges.of_tri[t][0];
        if !split[e] {
            split[e] = true;
            stack.push(e);
        }
    }
    // closure: a triangle touching a split edge must split its refinement edge
    while let Some(e) = stack.pop() {
        for &t in edges.tris[e].iter().filter(|&&t| t != NONE) {
            let r = edges.of_tri[t][0];
            if !split[r] {
                split[r] = true;
                stack.push(r);
            }
        }
    }
    if !split.iter().any(|&s| s) {
        return (mesh.clone(), fields.iter().map(|f| f.to_vec()).collect());
    }

    let mut vertices = mesh.vertices().to_vec();
    let mut data: Vec<Vec<T>> = fields.iter().map(|f| f.to_vec()).collect();
    let mut midpoint = vec![NONE; edges.keys.len()];
    let half = T::lit(0.5);
    for (e, &(a, b)) in edges.keys.iter().enumerate() {
        if split[e] {
            midpoint[e] = vertices.len();
            vertices.push(vertices[a].midpoint(vertices[b]));
            for d in data.iter_mut() {
                let v = (d[a] + d[b]) * half;
                d.push(v);
            }
        }
    }

    let mut triangles = Vec::with_capacity(tris.len() + 2 * marked.len());
    for (t, &[v0, v1, v2]) in tris.iter().enumerate() {
        let [e0, e1, e2] = edges.of_tri[t];
        if !split[e0] {
            triangles.push([v0, v1, v2]);
            continue;
        }
        let m = midpoint[e0];
        // (m, v0, v1): refinement edge (v0, v1) = parent edge opposite v2
        if split[e2] {
            let mm = midpoint[e2];
            triangles.push([mm, m, v0]);
            triangles.push([mm, v1, m]);
        } else {
            triangles.push([m, v0, v1]);
        }
        // (m, v2, v0): refinement edge (v2, v0) = parent edge opposite v1
        if split[e1] {
            let mm = midpoint[e1];
            triangles.push([mm, m, v2]);
            triangles.push([mm, v0, m]);
        } else {
            triangles.push([m, v2, v0]);
        }
    }

    let mut boundary = Vec::with_capacity(mesh.boundary_edges().len() + 16);
    for be in mesh.boundary_edges() {
        let e = edges.find(be.v[0], be.v[1]);
        match e.filter(|&e| split[e]) {
            Some(e) => {
                let m = midpoint[e];
                boundary.push(BoundaryEdge { v: [be.v[0], m], arc: be.arc });
                boundary.push(BoundaryEdge { v: [m, be.v[1]], arc: be.arc });
            }
            None => boundary.push(*be),
        }
    }

    (TriMesh::from_parts_unchecked(vertices, triangles, boundary), data)
}
