//! P1 stiffness assembly with Dirichlet folding.

use crate::error::{Error, Result};
use crate::geometry::{Arc, Point};
use crate::mesh::{EdgeTable, TriMesh, NONE};
use crate::scalar::Scalar;

/// Which pair of opposite arcs carries the Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryProblem {
    /// `u = 0` on γ2, `u = 1` on γ4, zero flux on γ1 and γ3.
    Primal,
    /// `u = 0` on γ3, `u = 1` on γ1, zero flux on γ2 and γ4: the problem of
    /// the quadrilateral with corners shifted to `(z2, z3, z4, z1)`.
    Conjugate,
}

impl BoundaryProblem {
    /// Fixed value on `arc`, or `None` for a Neumann arc.
    pub fn dirichlet_value<T: Scalar>(self, arc: Arc) -> Option<T> {
        match (self, arc) {
            (Self::Primal, Arc::Gamma2) | (Self::Conjugate, Arc::Gamma3) => Some(T::zero()),
            (Self::Primal, Arc::Gamma4) | (Self::Conjugate, Arc::Gamma1) => Some(T::one()),
            _ => None,
        }
    }
}

/// Symmetric matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    pub dimension: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Entry `(i, j)`, zero when outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> T {
        let row = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[row.clone()].binary_search(&j) {
            Ok(k) => self.values[row.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dimension).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dimension) {
            let mut acc = T::zero();
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc = acc + self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
    }

    /// Largest `|a_ij - a_ji|` relative to `max(|a_ij|, |a_ji|)`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dimension {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                let j = self.col_indices[k];
                let (a, b) = (self.values[k], self.get(j, i));
                let scale = a.abs().max(b.abs());
                if scale > T::zero() {
                    worst = worst.max((a - b).abs() / scale);
                }
            }
        }
        worst
    }

    fn from_dense(dense: &[Vec<T>]) -> Self {
        let n = dense.len();
        let mut m = Self { dimension: n, row_offsets: vec![0], col_indices: Vec::new(), values: Vec::new() };
        for row in dense {
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    m.col_indices.push(j);
                    m.values.push(v);
                }
            }
            m.row_offsets.push(m.col_indices.len());
        }
        m
    }
}

/// Linear system `A u = b` with Dirichlet rows replaced by identity rows and
/// the matching columns moved to the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem<T> {
    pub matrix: CsrMatrix<T>,
    pub rhs: Vec<T>,
    /// Fixed value per vertex, `None` for free vertices.
    pub dirichlet_mask: Vec<Option<T>>,
}

impl<T: Scalar> SparseSystem<T> {
    pub fn dimension(&self) -> usize {
        self.matrix.dimension
    }

    /// Wraps a dense SPD matrix without constraints.
    pub fn from_dense(a: &[Vec<T>], rhs: Vec<T>) -> Self {
        Self { matrix: CsrMatrix::from_dense(a), dirichlet_mask: vec![None; rhs.len()], rhs }
    }
}

/// Local P1 stiffness matrix of a counter-clockwise triangle,
/// `K_ij = (b_i b_j + c_i c_j) / (4A)`.
pub fn local_stiffness<T: Scalar>(p: [Point<T>; 3]) -> [[T; 3]; 3] {
    let (b, c, twice_area) = shape_coefficients(p);
    let denom = twice_area + twice_area;
    let mut k = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / denom;
        }
    }
    k
}

/// Coefficients with `∇φ_i = (b_i, c_i) / (2A)`, and `2A`.
pub(crate) fn shape_coefficients<T: Scalar>(p: [Point<T>; 3]) -> ([T; 3], [T; 3], T) {
    let b = [p[1].y - p[2].y, p[2].y - p[0].y, p[0].y - p[1].y];
    let c = [p[2].x - p[1].x, p[0].x - p[2].x, p[1].x - p[0].x];
    let twice_area = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    (b, c, twice_area)
}

/// Global P1 stiffness matrix without boundary conditions. Entries are
/// accumulated in triangle order.
pub fn stiffness_matrix<T: Scalar>(mesh: &TriMesh<T>) -> CsrMatrix<T> {
    stiffness_with_edges(mesh, &EdgeTable::build(mesh.triangles()))
}

pub(crate) fn stiffness_with_edges<T: Scalar>(mesh: &TriMesh<T>, edges: &EdgeTable) -> CsrMatrix<T> {
    let n = mesh.num_vertices();
    let tris = mesh.triangles();
    let mut row_offsets = vec![0usize; n + 1];
    row_offsets[1..].fill(1);
    for &(a, b) in &edges.keys {
        row_offsets[a + 1] += 1;
        row_offsets[b + 1] += 1;
    }
    for i in 0..n {
        row_offsets[i + 1] += row_offsets[i];
    }
    let mut fill: Vec<usize> = row_offsets[..n].to_vec();
    let mut col_indices = vec![0usize; row_offsets[n]];
    for i in 0..n {
        col_indices[fill[i]] = i;
        fill[i] += 1;
    }
    for &(a, b) in &edges.keys {
        col_indices[fill[a]] = b;
        fill[a] += 1;
        col_indices[fill[b]] = a;
        fill[b] += 1;
    }
    for i in 0..n {
        col_indices[row_offsets[i]..row_offsets[i + 1]].sort_unstable();
    }
    let mut values = vec![T::zero(); col_indices.len()];
    for (t, tri) in tris.iter().enumerate() {
        let k = local_stiffness(mesh.corners(t));
        for (a, &i) in tri.iter().enumerate() {
            let row = row_offsets[i]..row_offsets[i + 1];
            let cols = &col_indices[row.clone()];
            for (b, &j) in tri.iter().enumerate() {
                let pos = row.start + cols.iter().position(|&c| c == j).expect("pattern holds every triangle pair");
                values[pos] = values[pos] + k[a][b];
            }
        }
    }
    CsrMatrix { dimension: n, row_offsets, col_indices, values }
}

/// Per-vertex Dirichlet values of `problem`. A corner shared by a Dirichlet
/// and a Neumann arc takes the Dirichlet value.
pub fn dirichlet_values<T: Scalar>(mesh: &TriMesh<T>, problem: BoundaryProblem) -> Result<Vec<Option<T>>> {
    let mut mask: Vec<Option<T>> = vec![None; mesh.num_vertices()];
    for be in mesh.boundary_edges() {
        if let Some(g) = problem.dirichlet_value::<T>(be.arc) {
            for &v in &be.v {
                match mask[v] {
                    Some(old) if old != g => {
                        return Err(Error::Assembly(format!("vertex {v} lies on both Dirichlet arcs")));
                    }
                    _ => mask[v] = Some(g),
                }
            }
        }
    }
    Ok(mask)
}

/// Assembles the primal problem (`u = 0` on γ2, `u = 1` on γ4).
pub fn assemble<T: Scalar>(mesh: &TriMesh<T>) -> Result<SparseSystem<T>> {
    assemble_problem(mesh, BoundaryProblem::Primal)
}

/// Assembles `problem` on `mesh` and folds the Dirichlet data in.
pub fn assemble_problem<T: Scalar>(mesh: &TriMesh<T>, problem: BoundaryProblem) -> Result<SparseSystem<T>> {
    let edges = EdgeTable::build(mesh.triangles());
    check_boundary_labels(mesh, &edges)?;
    fold(stiffness_with_edges(mesh, &edges), dirichlet_values(mesh, problem)?)
}

/// Moves the Dirichlet columns of `full` to the right-hand side and replaces
/// the Dirichlet rows with identity rows.
pub(crate) fn fold<T: Scalar>(full: CsrMatrix<T>, mask: Vec<Option<T>>) -> Result<SparseSystem<T>> {
    if !mask.iter().any(Option::is_some) {
        return Err(Error::Assembly("no Dirichlet vertices".into()));
    }
    let n = full.dimension;
    let mut rhs = vec![T::zero(); n];
    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::with_capacity(full.col_indices.len());
    let mut values = Vec::with_capacity(full.values.len());
    for i in 0..n {
        if let Some(g) = mask[i] {
            col_indices.push(i);
            values.push(T::one());
            rhs[i] = g;
        } else {
            for k in full.row_offsets[i]..full.row_offsets[i + 1] {
                let j = full.col_indices[k];
                match mask[j] {
                    Some(g) => rhs[i] = rhs[i] - full.values[k] * g,
                    None => {
                        col_indices.push(j);
                        values.push(full.values[k]);
                    }
                }
            }
        }
        row_offsets.push(col_indices.len());
    }
    let matrix = CsrMatrix { dimension: n, row_offsets, col_indices, values };
    if let Some(i) = matrix.diagonal().iter().position(|&d| !(d > T::zero())) {
        return Err(Error::Assembly(format!("non-positive diagonal at vertex {i}")));
    }
    Ok(SparseSystem { matrix, rhs, dirichlet_mask: mask })
}

/// Every edge with a single adjacent triangle must carry an arc label.
pub(crate) fn check_boundary_labels<T: Scalar>(mesh: &TriMesh<T>, edges: &EdgeTable) -> Result<()> {
    let mut labelled = vec![false; edges.keys.len()];
    for be in mesh.boundary_edges() {
        if let Some(e) = edges.find(be.v[0], be.v[1]) {
            labelled[e] = true;
        }
    }
    for (e, t) in edges.tris.iter().enumerate() {
        if t[1] == NONE && !labelled[e] {
            let (a, b) = edges.keys[e];
            return Err(Error::Assembly(format!("boundary edge ({a}, {b}) has no arc label")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::BoundaryEdge;

    fn pt(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }

    fn square() -> TriMesh<f64> {
        let v = vec![pt(1.0, 1.0), pt(0.0, 1.0), pt(0.0, 0.0), pt(1.0, 0.0)];
        let be = [(0, 1, Arc::Gamma1), (1, 2, Arc::Gamma2), (2, 3, Arc::Gamma3), (3, 0, Arc::Gamma4)]
            .map(|(a, b, arc)| BoundaryEdge { v: [a, b], arc })
            .to_vec();
        TriMesh::from_parts(v, vec![[1, 2, 0], [3, 0, 2]], be).unwrap()
    }

    #[test]
    fn local_rows_sum_to_zero() {
        let k = local_stiffness([pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)]);
        for row in &k {
            assert!(row.iter().sum::<f64>().abs() < 1e-15);
        }
        assert_eq!(k[0], [1.0, -0.5, -0.5]);
        assert_eq!(k[1], [-0.5, 0.5, 0.0]);
    }

    #[test]
    fn two_triangle_square_by_hand() {
        // vertices (1,1), (0,1), (0,0), (1,0), diagonal 0-2; each right
        // triangle contributes 1 at its right-angle vertex, 1/2 at the two
        // acute ones, -1/2 along its legs and 0 along the hypotenuse
        let expect = [
            [1.0, -0.5, 0.0, -0.5],
            [-0.5, 1.0, -0.5, 0.0],
            [0.0, -0.5, 1.0, -0.5],
            [-0.5, 0.0, -0.5, 1.0],
        ];
        let a = stiffness_matrix(&square());
        for i in 0..4 {
            for j in 0..4 {
                assert!((a.get(i, j) - expect[i][j]).abs() < 1e-15, "({i}, {j})");
            }
        }
        assert_eq!(a.asymmetry(), 0.0);
    }

    #[test]
    fn folding_gives_identity_rows() {
        let s = assemble(&square()).unwrap();
        // γ2 = (1, 2) fixed at 0, γ4 = (3, 0) fixed at 1: everything is fixed
        assert_eq!(s.dirichlet_mask, vec![Some(1.0), Some(0.0), Some(0.0), Some(1.0)]);
        assert_eq!(s.rhs, vec![1.0, 0.0, 0.0, 1.0]);
        for i in 0..4 {
            assert_eq!(s.matrix.get(i, i), 1.0);
        }
        assert_eq!(s.matrix.col_indices.len(), 4);
    }

    #[test]
    fn unlabelled_boundary_is_rejected() {
        let m = square();
        let mut be = m.boundary_edges().to_vec();
        be.pop();
        let broken = TriMesh::from_parts_unchecked(m.vertices().to_vec(), m.triangles().to_vec(), be);
        assert!(matches!(assemble(&broken), Err(Error::Assembly(_))));
    }

    #[test]
    fn conjugate_problem_values() {
        assert_eq!(BoundaryProblem::Conjugate.dirichlet_value::<f64>(Arc::Gamma1), Some(1.0));
        assert_eq!(BoundaryProblem::Conjugate.dirichlet_value::<f64>(Arc::Gamma3), Some(0.0));
        assert_eq!(BoundaryProblem::Conjugate.dirichlet_value::<f64>(Arc::Gamma2), None);
        let s = assemble_problem(&square(), BoundaryProblem::Conjugate).unwrap();
        assert_eq!(s.dirichlet_mask, vec![Some(1.0), Some(1.0), Some(0.0), Some(0.0)]);
    }
}
