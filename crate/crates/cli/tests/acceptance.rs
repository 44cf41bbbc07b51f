//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails. Solves run at the default budget
//! of 200,000 vertices, so a full run takes several minutes.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use quadmod::exact::{bowman_asymptotic, bowman_modulus, circular_quad_modulus, parallelogram_modulus, CircularQuadParams};
use quadmod::fem::{assemble, dorfler_mark, error_indicator, solve_cg, solve_on_mesh};
use quadmod::geometry::{discretize_circular_quad, trapezoid, PolygonQuad};
use quadmod::mesh::{bisect, triangulate};
use quadmod::specfun::{inv_mu, mu, mu_pair, EllipticModulusPair};
use quadmod::ModulusResult64;
use quadmod_cli::commands::{
    circular_table, default_circular_thetas, default_trapezoid_heights, half_open_grid, interior_grid,
    parallelogram_grid, recip_grid, solve, trapezoid_table, SolveSettings,
};
use quadmod_cli::shapes::{grid_quad, ShapeSpec};

/// Printed Bowman values for h = 1.1, 1.2, ..., 2.0.
const BOWMAN_TABLE: [(f64, f64); 10] = [
    (1.1, 0.3403135),
    (1.2, 0.4614926),
    (1.3, 0.5704374),
    (1.4, 0.6747518),
    (1.5, 0.7769434),
    (1.6, 0.8780838),
    (1.7, 0.9786842),
    (1.8, 1.0790024),
    (1.9, 1.1791715),
    (2.0, 1.2792616),
];

/// Printed exact moduli of the circular quadrilateral at r = 0.4.
const CIRCULAR_TABLE: [(f64, f64); 11] = [
    (0.10, 7.597433),
    (0.15, 5.054357),
    (0.20, 3.779611),
    (0.25, 3.012175),
    (0.30, 2.498368),
    (0.35, 2.129465),
    (1.00, 0.620631),
    (1.05, 0.575402),
    (1.10, 0.533010),
    (1.15, 0.492934),
    (1.20, 0.454689),
];

const DEFECT_TOL: f64 = 5e-4;
const MAX_PRINCIPLE_SLACK: f64 = 1e-10;

type Outcome = Result<String, String>;

struct Run {
    failures: usize,
    /// Every FEM result, for the maximum principle check.
    solves: Vec<(String, ModulusResult64)>,
}

impl Run {
    fn report(&mut self, n: usize, name: &str, started: Instant, outcome: Outcome) {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n} [{name}] {detail} ({secs:.1} s)"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL criterion {n} [{name}] {detail} ({secs:.1} s)");
            }
        }
    }

    fn record(&mut self, label: String, r: &ModulusResult64) {
        self.solves.push((label, r.clone()));
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    format!("error: {e}")
}

fn bowman_column() -> Outcome {
    let mut worst = (0.0, 0.0);
    for (h, printed) in BOWMAN_TABLE {
        let err = (bowman_modulus(h).map_err(fail)?.value - printed).abs();
        if err > worst.1 {
            worst = (h, err);
        }
    }
    check(worst.1 <= 5e-8, format!("max |bowman - printed| = {:.2e} at h = {} (tol 5e-8)", worst.1, worst.0))
}

fn circular_exact_column() -> Outcome {
    let mut worst = (0.0, 0.0);
    for (theta, printed) in CIRCULAR_TABLE {
        let p = CircularQuadParams::new(theta, 0.4).map_err(fail)?;
        let err = (circular_quad_modulus(&p) - printed).abs();
        if err > worst.1 {
            worst = (theta, err);
        }
    }
    check(worst.1 <= 1e-6, format!("max |exact - printed| = {:.2e} at theta = {} (tol 1e-6)", worst.1, worst.0))
}

fn trapezoids(run: &mut Run, s: &SolveSettings) -> Outcome {
    let hs = default_trapezoid_heights();
    let (_, results) = trapezoid_table(&hs, s).map_err(fail)?;
    let mut worst = (0.0, 0.0);
    for (&h, r) in hs.iter().zip(&results) {
        run.record(format!("trapezoid h={h}"), r);
        let err = (r.modulus - bowman_modulus(h).map_err(fail)?.value).abs();
        println!("    h = {h:.1}: fem = {:.9}, error = {err:.3e}, dofs = {}", r.modulus, r.dofs);
        if err > worst.1 {
            worst = (h, err);
        }
    }
    let defect = defect_check(&results)?;
    check(worst.1 <= 1e-4, format!("max |fem - bowman| = {:.2e} at h = {} (tol 1e-4); {defect}", worst.1, worst.0))
}

fn reciprocal_identity(run: &mut Run, s: &SolveSettings) -> Outcome {
    let g = half_open_grid(0.5, 3.0, 5);
    let (_, cells) = recip_grid(&g, &g, s).map_err(fail)?;
    let mut worst = (0.0, 0.0, 0.0);
    let mut results = Vec::new();
    for c in &cells {
        if c.f.abs() >= worst.2 {
            worst = (c.x, c.y, c.f.abs());
        }
        results.push(c.forward.clone());
        results.push(c.swapped.clone());
    }
    for c in &cells {
        run.record(format!("quad x={} y={}", c.x, c.y), &c.forward);
    }
    let defect = defect_check(&results)?;
    check(
        worst.2 <= 2e-4,
        format!("max |f| = {:.2e} at (x, y) = ({}, {}) over {} cells (tol 2e-4); {defect}", worst.2, worst.0, worst.1, cells.len()),
    )
}

fn circular_fem(run: &mut Run, s: &SolveSettings) -> Outcome {
    let thetas = default_circular_thetas();
    let (_, results) = circular_table(&thetas, 0.4, s).map_err(fail)?;
    let mut worst = (0.0, 0.0);
    for (&theta, r) in thetas.iter().zip(&results) {
        run.record(format!("circular theta={theta}"), r);
        let exact = circular_quad_modulus(&CircularQuadParams::new(theta, 0.4).map_err(fail)?);
        let err = (r.modulus - exact).abs();
        println!("    theta = {theta:.2}: fem = {:.7}, exact = {exact:.7}, error = {err:.3e}", r.modulus);
        if err > worst.1 {
            worst = (theta, err);
        }
    }
    let defect = defect_check(&results)?;
    check(
        worst.1 <= 5e-3,
        format!("max |fem - exact| = {:.2e} at theta = {} over {} angles, n = {} (tol 5e-3); {defect}", worst.1, worst.0, thetas.len(), s.arc_segments),
    )
}

fn defect_check(results: &[ModulusResult64]) -> Result<String, String> {
    let worst = results.iter().map(|r| r.reciprocal_defect).fold(0.0, f64::max);
    if worst <= DEFECT_TOL {
        Ok(format!("max reciprocal_defect = {worst:.2e} (tol 5e-4)"))
    } else {
        Err(format!("max reciprocal_defect = {worst:.2e} exceeds 5e-4"))
    }
}

fn canonical(run: &mut Run, s: &SolveSettings) -> Outcome {
    let square = solve(&grid_quad(1.0, 1.0).map_err(fail)?, s).map_err(fail)?;
    let rect = solve(&ShapeSpec::Rectangle { h: 2.0 }.build(s.arc_segments).map_err(fail)?, s).map_err(fail)?;
    run.record("square".into(), &square);
    run.record("rectangle h=2".into(), &rect);
    let ts = interior_grid(0.0, FRAC_PI_2, 6);
    let (_, cells) = parallelogram_grid(&ts, &[1.0], s).map_err(fail)?;
    let mut g_err: f64 = 0.0;
    for c in &cells {
        run.record(format!("parallelogram t={} h=1", c.t), &c.fem);
        g_err = g_err.max((c.fem.modulus - 1.0).abs());
    }
    let e_sq = (square.modulus - 1.0).abs();
    let e_rect = (rect.modulus - 2.0).abs();
    check(
        e_sq <= 1e-6 && e_rect <= 1e-5 && g_err <= 1e-4,
        format!(
            "|square - 1| = {e_sq:.2e} (tol 1e-6), |rectangle - 2| = {e_rect:.2e} (tol 1e-5), max |g(t,1) - 1| = {g_err:.2e} over {} t (tol 1e-4)",
            ts.len()
        ),
    )
}

fn asymptotic() -> Outcome {
    let diff = (bowman_modulus(4.0_f64).map_err(fail)?.value - bowman_asymptotic(4.0_f64)).abs();
    check(diff <= 1e-5, format!("|bowman(4) - asymptotic(4)| = {diff:.2e} (tol 1e-5)"))
}

fn properties(run: &Run) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut prod_err: f64 = 0.0;
    let mut trip_err: f64 = 0.0;
    for i in 0..10 {
        let a = 0.05 * (i + 1) as f64;
        let c = PI / (2.0 * (PI * a).sin());
        for j in 0..10 {
            let r = 0.05 + 0.1 * j as f64;
            let pair = EllipticModulusPair::from_r(r);
            let prod = mu_pair(a, &pair).map_err(fail)? * mu_pair(a, &pair.swapped()).map_err(fail)?;
            prod_err = prod_err.max((prod / (c * c) - 1.0).abs());
            trip_err = trip_err.max((inv_mu(a, mu(a, r).map_err(fail)?).map_err(fail)? - r).abs());
        }
    }
    ok &= prod_err <= 1e-11 && trip_err <= 1e-10;
    notes.push(format!("mu product {prod_err:.1e}, inv_mu round trip {trip_err:.1e}"));

    let mut g_err: f64 = 0.0;
    for h in [0.5, 1.0, 1.5, 2.0] {
        g_err = g_err.max((parallelogram_modulus(FRAC_PI_2, h).map_err(fail)? - h).abs());
    }
    ok &= g_err <= 1e-10;
    notes.push(format!("g(pi/2,h) {g_err:.1e}"));

    let mut area_err: f64 = 0.0;
    for q in [trapezoid(1.5).map_err(fail)?, discretize_circular_quad(0.5, 0.4, 64).map_err(fail)?] {
        area_err = area_err.max(adaptive_audit(&q)?);
    }
    ok &= area_err <= 1e-12;
    notes.push(format!("10 adaptive iterations audited, area error {area_err:.1e}"));

    let patch = patch_test()?;
    ok &= patch <= 1e-12;
    notes.push(format!("patch test {patch:.1e}"));

    let mut violations = Vec::new();
    for (label, r) in &run.solves {
        let (lo, hi) = r.solution_range;
        if lo < -MAX_PRINCIPLE_SLACK || hi > 1.0 + MAX_PRINCIPLE_SLACK {
            violations.push(format!("{label}: [{lo:e}, {hi}]"));
        }
    }
    ok &= violations.is_empty() && !run.solves.is_empty();
    notes.push(format!("max principle on {} solves, {} violations {violations:?}", run.solves.len(), violations.len()));

    check(ok, notes.join("; "))
}

/// Runs 10 solve-estimate-mark-refine iterations, auditing the mesh after
/// each; returns the worst relative area discrepancy.
fn adaptive_audit(q: &PolygonQuad<f64>) -> Result<f64, String> {
    let mut mesh = triangulate(q, q.area() / 64.0).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let u = solve_cg(&assemble(&mesh).map_err(fail)?, 1e-10).map_err(fail)?;
        let eta = error_indicator(&mesh, &u);
        mesh = bisect(&mesh, &dorfler_mark(&eta, 0.5));
        mesh.audit().map_err(fail)?;
        worst = worst.max((mesh.area() / q.area() - 1.0).abs());
    }
    Ok(worst)
}

/// On the rectangle of width 1 and height 2 the primal solution is `x`.
fn patch_test() -> Result<f64, String> {
    let q = ShapeSpec::Rectangle { h: 2.0 }.build(0).map_err(fail)?;
    let mut mesh = triangulate(&q, 0.01).map_err(fail)?;
    let every: Vec<usize> = (0..mesh.num_triangles()).step_by(3).collect();
    mesh = bisect(&mesh, &every);
    let sol = solve_on_mesh(&mesh, 1e-14, None).map_err(fail)?;
    Ok(mesh.vertices().iter().zip(&sol.primal).map(|(p, u)| (u - p.x).abs()).fold(0.0, f64::max))
}

fn main() -> ExitCode {
    let s = SolveSettings::default();
    println!("acceptance: budget = {}, tol = {:e}, arc segments = {}", s.budget, s.tol, s.arc_segments);
    let mut run = Run { failures: 0, solves: Vec::new() };

    let t = Instant::now();
    run.report(1, "Bowman column", t, bowman_column());
    let t = Instant::now();
    run.report(2, "circular exact column", t, circular_exact_column());
    let t = Instant::now();
    let out = trapezoids(&mut run, &s);
    run.report(3, "trapezoid FEM", t, out);
    let t = Instant::now();
    let out = reciprocal_identity(&mut run, &s);
    run.report(4, "reciprocal identity", t, out);
    let t = Instant::now();
    let out = circular_fem(&mut run, &s);
    run.report(5, "circular FEM", t, out);
    let t = Instant::now();
    let out = canonical(&mut run, &s);
    run.report(6, "canonical cases", t, out);
    let t = Instant::now();
    run.report(7, "asymptotic consistency", t, asymptotic());
    let t = Instant::now();
    let out = properties(&run);
    run.report(8, "property suites", t, out);

    if run.failures == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 8 criteria failed", run.failures);
        ExitCode::FAILURE
    }
}
