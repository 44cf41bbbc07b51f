//! Dirichlet energy, residual error indicator and Dörfler marking.

use std::cmp::Ordering;

use super::assemble::{shape_coefficients, BoundaryProblem};
use crate::geometry::{Arc, Point};
use crate::mesh::{EdgeTable, TriMesh, NONE};
use crate::scalar::Scalar;

/// Constant gradient of the P1 field `u` on triangle `t`.
pub fn gradient<T: Scalar>(mesh: &TriMesh<T>, t: usize, u: &[T]) -> Point<T> {
    let (b, c, twice_area) = shape_coefficients(mesh.corners(t));
    let tri = mesh.triangles()[t];
    let mut g = Point::new(T::zero(), T::zero());
    for k in 0..3 {
        g.x = g.x + u[tri[k]] * b[k];
        g.y = g.y + u[tri[k]] * c[k];
    }
    g.scale(twice_area.recip())
}

/// `∫ |∇u|²` of a P1 field, summed in triangle order.
pub fn dirichlet_energy<T: Scalar>(mesh: &TriMesh<T>, u: &[T]) -> T {
    let mut acc = T::zero();
    for t in 0..mesh.num_triangles() {
        let g = gradient(mesh, t, u);
        acc = acc + mesh.triangle_area(t) * g.dot(g);
    }
    acc
}

/// Squared per-triangle indicators `η_T² = Σ_e h_e |e| J_e²` for the primal
/// problem; see [`error_indicator_for`].
pub fn error_indicator<T: Scalar>(mesh: &TriMesh<T>, u: &[T]) -> Vec<T> {
    error_indicator_for(mesh, u, BoundaryProblem::Primal)
}

/// Squared per-triangle indicators. `J_e` is the jump of the normal
/// derivative across an interior edge, the normal derivative itself on a
/// Neumann edge and zero on a Dirichlet edge; an interior edge contributes to
/// both neighbours. The weight `h_e |e|` with `h_e = |e|` is the usual
/// residual-estimator scaling.
pub fn error_indicator_for<T: Scalar>(mesh: &TriMesh<T>, u: &[T], problem: BoundaryProblem) -> Vec<T> {
    indicator_with_edges(mesh, &EdgeTable::build(mesh.triangles()), u, problem)
}

pub(crate) fn indicator_with_edges<T: Scalar>(
    mesh: &TriMesh<T>,
    edges: &EdgeTable,
    u: &[T],
    problem: BoundaryProblem,
) -> Vec<T> {
    let tris = mesh.triangles();
    let verts = mesh.vertices();
    let mut arc_of: Vec<Option<Arc>> = vec![None; edges.keys.len()];
    for be in mesh.boundary_edges() {
        if let Some(e) = edges.find(be.v[0], be.v[1]) {
            arc_of[e] = Some(be.arc);
        }
    }
    let grads: Vec<Point<T>> = (0..tris.len()).map(|t| gradient(mesh, t, u)).collect();
    let mut eta = vec![T::zero(); tris.len()];
    for (e, &[t0, t1]) in edges.tris.iter().enumerate() {
        // normal of the edge as seen from t0, scaled by |e|
        let k = edges.of_tri[t0].iter().position(|&x| x == e).expect("edge belongs to its triangle");
        let (a, b) = (verts[tris[t0][(k + 1) % 3]], verts[tris[t0][(k + 2) % 3]]);
        let d = b.sub(a);
        let scaled_normal = Point::new(d.y, -d.x);
        let flux = if t1 != NONE {
            grads[t0].sub(grads[t1]).dot(scaled_normal)
        } else {
            match arc_of[e] {
                Some(arc) if problem.dirichlet_value::<T>(arc).is_some() => continue,
                _ => grads[t0].dot(scaled_normal),
            }
        };
        // (J |e|)² = h_e |e| J²
        let w = flux * flux;
        eta[t0] = eta[t0] + w;
        if t1 != NONE {
            eta[t1] = eta[t1] + w;
        }
    }
    eta
}

/// Smallest set of triangles, taken in decreasing indicator order (ties by
/// index), whose indicators sum to at least `theta` times the total.
pub fn dorfler_mark<T: Scalar>(eta_sq: &[T], theta: T) -> Vec<usize> {
    let total: T = eta_sq.iter().copied().sum();
    if !(total > T::zero()) {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..eta_sq.len()).collect();
    order.sort_by(|&i, &j| eta_sq[j].partial_cmp(&eta_sq[i]).unwrap_or(Ordering::Equal).then(i.cmp(&j)));
    let goal = theta * total;
    let mut acc = T::zero();
    let mut marked = Vec::new();
    for i in order {
        if acc >= goal {
            break;
        }
        acc = acc + eta_sq[i];
        marked.push(i);
    }
    marked
}
