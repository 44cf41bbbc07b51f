//! Jacobi-preconditioned conjugate gradients.

use super::assemble::SparseSystem;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative residual target.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Result of a CG run.
#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// `‖b - A x‖ / ‖b‖` of the recursively updated residual.
    pub relative_residual: T,
}

/// Iteration cap `20 √n + 1000`.
pub fn iteration_cap(n: usize) -> usize {
    (20.0 * (n as f64).sqrt()) as usize + 1000
}

/// Solves `s` from a zero initial guess.
pub fn solve_cg<T: Scalar>(s: &SparseSystem<T>, rel_tol: T) -> Result<Vec<T>> {
    Ok(solve_cg_from(s, rel_tol, None)?.x)
}

/// Solves `s` starting from `x0` (Dirichlet entries are reset to their fixed
/// values). Stops when the relative residual is at most `rel_tol`.
pub fn solve_cg_from<T: Scalar>(s: &SparseSystem<T>, rel_tol: T, x0: Option<&[T]>) -> Result<CgOutcome<T>> {
    let n = s.dimension();
    let a = &s.matrix;
    let mut x: Vec<T> = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        Some(x0) => return Err(Error::Domain(format!("initial guess has length {}, expected {n}", x0.len()))),
        None => vec![T::zero(); n],
    };
    for (xi, g) in x.iter_mut().zip(&s.dirichlet_mask) {
        if let Some(g) = *g {
            *xi = g;
        }
    }
    let b_norm = norm(&s.rhs);
    if b_norm == T::zero() {
        return Ok(CgOutcome { x: vec![T::zero(); n], iterations: 0, relative_residual: T::zero() });
    }
    let inv_diag: Vec<T> = a.diagonal().iter().map(|&d| d.recip()).collect();
    let (rows, cols, vals) = (&a.row_offsets, &a.col_indices, &a.values);
    let mut r: Vec<T> = vec![T::zero(); n];
    a.matvec(&x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(&s.rhs) {
        *ri = bi - *ri;
    }
    let mut p: Vec<T> = r.iter().zip(&inv_diag).map(|(&r, &d)| r * d).collect();
    let mut ap = vec![T::zero(); n];
    let mut rz = dot(&r, &p);
    let mut rr = dot(&r, &r);
    let cap = iteration_cap(n);
    let mut iterations = 0;
    while rr.sqrt() > rel_tol * b_norm {
        if iterations >= cap {
            return Err(Error::Solver { iterations, residual: (rr.sqrt() / b_norm).as_f64() });
        }
        // ap = A p and p·Ap in one sweep
        let mut pap = T::zero();
        for i in 0..n {
            let mut acc = T::zero();
            for k in rows[i]..rows[i + 1] {
                acc = acc + vals[k] * p[cols[k]];
            }
            ap[i] = acc;
            pap = pap + p[i] * acc;
        }
        if !(pap > T::zero()) {
            return Err(Error::Solver { iterations, residual: (rr.sqrt() / b_norm).as_f64() });
        }
        let alpha = rz / pap;
        let mut rz_next = T::zero();
        rr = T::zero();
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            let ri = r[i] - alpha * ap[i];
            r[i] = ri;
            rz_next = rz_next + ri * ri * inv_diag[i];
            rr = rr + ri * ri;
        }
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = r[i] * inv_diag[i] + beta * p[i];
        }
        iterations += 1;
    }
    Ok(CgOutcome { x, iterations, relative_residual: rr.sqrt() / b_norm })
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (&a, &b) in u.iter().zip(v) {
        acc = acc + a * b;
    }
    acc
}

fn norm<T: Scalar>(u: &[T]) -> T {
    dot(u, u).sqrt()
}
