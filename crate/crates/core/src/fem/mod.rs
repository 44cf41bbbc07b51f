//! Piecewise-linear finite elements for the mixed Dirichlet–Neumann problem
//! whose energy is the modulus, with an adaptive refinement driver.

mod assemble;
mod estimate;
mod solve;

pub use assemble::{
    assemble, assemble_problem, dirichlet_values, local_stiffness, stiffness_matrix, BoundaryProblem, CsrMatrix,
    SparseSystem,
};
pub use estimate::{dirichlet_energy, dorfler_mark, error_indicator, error_indicator_for, gradient};
pub use solve::{iteration_cap, solve_cg, solve_cg_from, CgOutcome, DEFAULT_REL_TOL};

use crate::error::{Error, Result};
use crate::geometry::PolygonQuad;
use crate::mesh::{bisect_with_edges, triangulate, EdgeTable, TriMesh};
use crate::scalar::Scalar;

/// Default degree-of-freedom budget of the adaptive loop.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Tuning of [`compute_modulus_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions<T> {
    /// Largest vertex count of the final mesh.
    pub budget: usize,
    /// CG relative residual target.
    pub rel_tol: T,
    /// Dörfler bulk fraction.
    pub theta: T,
    /// The initial mesh has triangles of area at most `area / initial_divisions`.
    pub initial_divisions: usize,
}

impl<T: Scalar> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, rel_tol: T::lit(DEFAULT_REL_TOL), theta: T::lit(0.5), initial_divisions: 64 }
    }
}

/// One accepted level of the adaptive loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRecord<T> {
    pub dofs: usize,
    pub energy_primal: T,
    pub energy_dual: T,
    /// `sqrt(Σ η_T²)` of the primal solution.
    pub eta: T,
}

/// Outcome of [`compute_modulus`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusResult<T> {
    /// `sqrt(energy_primal / energy_dual)`.
    pub modulus: T,
    /// Vertex count of the final mesh.
    pub dofs: usize,
    pub energy_primal: T,
    /// Energy of the conjugate problem, ideally `1 / energy_primal`.
    pub energy_dual: T,
    /// `|energy_primal · energy_dual - 1|`.
    pub reciprocal_defect: T,
    /// Global a posteriori indicator of the final primal solution.
    pub eta_global: T,
    /// CG iterations over all solves.
    pub cg_iterations: usize,
    /// Smallest and largest nodal value over both final solutions.
    pub solution_range: (T, T),
    pub levels: Vec<LevelRecord<T>>,
}

/// Primal and conjugate solutions on one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSolution<T> {
    pub primal: Vec<T>,
    pub dual: Vec<T>,
    pub energy_primal: T,
    pub energy_dual: T,
    pub cg_iterations: usize,
}

/// Solves both boundary problems on `mesh`, optionally warm-started.
pub fn solve_on_mesh<T: Scalar>(
    mesh: &TriMesh<T>,
    rel_tol: T,
    warm: Option<(&[T], &[T])>,
) -> Result<MeshSolution<T>> {
    solve_with_edges(mesh, &EdgeTable::build(mesh.triangles()), rel_tol, warm)
}

fn solve_with_edges<T: Scalar>(
    mesh: &TriMesh<T>,
    edges: &EdgeTable,
    rel_tol: T,
    warm: Option<(&[T], &[T])>,
) -> Result<MeshSolution<T>> {
    assemble::check_boundary_labels(mesh, edges)?;
    let full = assemble::stiffness_with_edges(mesh, edges);
    let primal = assemble::fold(full.clone(), dirichlet_values(mesh, BoundaryProblem::Primal)?)?;
    let dual = assemble::fold(full, dirichlet_values(mesh, BoundaryProblem::Conjugate)?)?;
    let p = solve_cg_from(&primal, rel_tol, warm.map(|w| w.0))?;
    let d = solve_cg_from(&dual, rel_tol, warm.map(|w| w.1))?;
    Ok(MeshSolution {
        energy_primal: dirichlet_energy(mesh, &p.x),
        energy_dual: dirichlet_energy(mesh, &d.x),
        cg_iterations: p.iterations + d.iterations,
        primal: p.x,
        dual: d.x,
    })
}

/// Adaptive modulus with default Dörfler fraction and initial mesh.
pub fn compute_modulus<T: Scalar>(q: &PolygonQuad<T>, budget: usize, rel_tol: T) -> Result<ModulusResult<T>> {
    compute_modulus_with(q, &AdaptiveOptions { budget, rel_tol, ..AdaptiveOptions::default() })
}

/// Runs solve, estimate, mark and refine until the next refinement would
/// exceed the budget, then reports the last accepted level.
///
/// Both problems are solved on every level; each refinement is driven by the
/// primal indicator and each solve starts from the interpolated previous
/// solution.
pub fn compute_modulus_with<T: Scalar>(q: &PolygonQuad<T>, opts: &AdaptiveOptions<T>) -> Result<ModulusResult<T>> {
    if opts.initial_divisions == 0 {
        return Err(Error::Domain("initial_divisions must be positive".into()));
    }
    let mut mesh = triangulate(q, q.area() / T::from_usize_lossy(opts.initial_divisions))?;
    if mesh.num_vertices() > opts.budget {
        return Err(Error::Domain(format!(
            "budget {} is below the initial mesh size {}",
            opts.budget,
            mesh.num_vertices()
        )));
    }
    let mut warm: Option<(Vec<T>, Vec<T>)> = None;
    let mut levels = Vec::new();
    let mut cg_iterations = 0;
    loop {
        let edges = EdgeTable::build(mesh.triangles());
        let warm_ref = warm.as_ref().map(|(p, d)| (p.as_slice(), d.as_slice()));
        let sol = solve_with_edges(&mesh, &edges, opts.rel_tol, warm_ref)?;
        cg_iterations += sol.cg_iterations;
        let eta_sq = estimate::indicator_with_edges(&mesh, &edges, &sol.primal, BoundaryProblem::Primal);
        let eta = eta_sq.iter().copied().sum::<T>().sqrt();
        levels.push(LevelRecord {
            dofs: mesh.num_vertices(),
            energy_primal: sol.energy_primal,
            energy_dual: sol.energy_dual,
            eta,
        });
        let marked = dorfler_mark(&eta_sq, opts.theta);
        let (next, mut data) = if marked.is_empty() {
            (mesh.clone(), Vec::new())
        } else {
            bisect_with_edges(&mesh, &edges, &marked, &[&sol.primal, &sol.dual])
        };
        if marked.is_empty() || next.num_vertices() > opts.budget {
            return Ok(finish(&mesh, sol, eta, cg_iterations, levels));
        }
        let dual = data.pop().expect("two fields");
        let primal = data.pop().expect("two fields");
        warm = Some((primal, dual));
        mesh = next;
    }
}

fn finish<T: Scalar>(
    mesh: &TriMesh<T>,
    sol: MeshSolution<T>,
    eta: T,
    cg_iterations: usize,
    levels: Vec<LevelRecord<T>>,
) -> ModulusResult<T> {
    let (lo, hi) = sol
        .primal
        .iter()
        .chain(&sol.dual)
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    ModulusResult {
        modulus: (sol.energy_primal / sol.energy_dual).sqrt(),
        dofs: mesh.num_vertices(),
        energy_primal: sol.energy_primal,
        energy_dual: sol.energy_dual,
        reciprocal_defect: (sol.energy_primal * sol.energy_dual - T::one()).abs(),
        eta_global: eta,
        cg_iterations,
        solution_range: (lo, hi),
        levels,
    }
}
