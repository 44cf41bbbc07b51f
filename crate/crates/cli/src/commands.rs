//! The experiment sweeps. Every grid cell is an independent solve; cells run
//! in parallel and rows come out in grid order.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use quadmod::exact::{bowman_modulus, circular_quad_modulus, parallelogram_modulus, CircularQuadParams};
use quadmod::fem::{compute_modulus, DEFAULT_BUDGET, DEFAULT_REL_TOL};
use quadmod::geometry::{discretize_circular_quad, parallelogram, trapezoid};
use quadmod::specfun::{mu_pair, EllipticModulusPair};
use quadmod::{ModulusResult64, PolygonQuad64};

use crate::error::CliError;
use crate::report::{format_sig9, GridReport};
use crate::shapes::grid_quad;

/// Floor added inside the plotted logarithms.
pub const LOG_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    pub budget: usize,
    pub tol: f64,
    /// Polygon points per arc of a circular quadrilateral.
    pub arc_segments: usize,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, tol: DEFAULT_REL_TOL, arc_segments: 64 }
    }
}

pub fn solve(q: &PolygonQuad64, s: &SolveSettings) -> Result<ModulusResult64, CliError> {
    if !(s.tol > 0.0 && s.tol < 1.0) {
        return Err(CliError::Input(format!("tolerance {} outside (0, 1)", s.tol)));
    }
    Ok(compute_modulus(q, s.budget, s.tol)?)
}

/// Solves every quadrilateral in parallel, keeping input order; the first
/// failure in input order is reported.
pub fn solve_all(quads: &[PolygonQuad64], s: &SolveSettings) -> Result<Vec<ModulusResult64>, CliError> {
    let results: Vec<Result<ModulusResult64, CliError>> = quads.par_iter().map(|q| solve(q, s)).collect();
    results.into_iter().collect()
}

/// `lo + k (hi - lo) / n` for `k = 1..=n`: the grid over `(lo, hi]`.
pub fn half_open_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + k as f64 * (hi - lo) / n as f64).collect()
}

/// `n` equispaced points of `[lo, hi]`; a single point is `lo`.
pub fn closed_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + k as f64 * (hi - lo) / (n - 1) as f64).collect(),
    }
}

/// `n` equispaced interior points of `(lo, hi)`.
pub fn interior_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| lo + k as f64 * (hi - lo) / (n + 1) as f64).collect()
}

pub fn modulus_report(input: &str, r: &ModulusResult64, s: &SolveSettings) -> GridReport {
    let mut rep = GridReport::new(
        "modulus",
        &["modulus", "dofs", "energy_primal", "energy_dual", "reciprocal_defect", "eta_global", "cg_iterations"],
    )
    .param("input", input)
    .param("tol", format_sig9(s.tol))
    .param("arc_segments", s.arc_segments)
    .with_budget(s.budget);
    rep.push_row(vec![
        r.modulus,
        r.dofs as f64,
        r.energy_primal,
        r.energy_dual,
        r.reciprocal_defect,
        r.eta_global,
        r.cg_iterations as f64,
    ])
    .expect("seven columns");
    rep
}

/// One point of the reciprocal-identity grid.
#[derive(Debug, Clone)]
pub struct RecipCell {
    pub x: f64,
    pub y: f64,
    /// `QM(x + iy, i, 0, 1)`.
    pub forward: ModulusResult64,
    /// `QM(y + ix, i, 0, 1)`.
    pub swapped: ModulusResult64,
    /// `forward - 1/swapped`, zero in exact arithmetic.
    pub f: f64,
}

/// `f(x, y) = QM(x+iy, i, 0, 1) - 1/QM(y+ix, i, 0, 1)` over `xs × ys`
/// (`x` outer). Each distinct quadrilateral is solved once.
pub fn recip_grid(xs: &[f64], ys: &[f64], s: &SolveSettings) -> Result<(GridReport, Vec<RecipCell>), CliError> {
    if let Some(v) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v <= 3.0)) {
        return Err(CliError::Input(format!("grid coordinate {v} outside (0, 3]")));
    }
    let mut index: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut points = Vec::new();
    for &x in xs {
        for &y in ys {
            for (a, b) in [(x, y), (y, x)] {
                index.entry((a.to_bits(), b.to_bits())).or_insert_with(|| {
                    points.push((a, b));
                    points.len() - 1
                });
            }
        }
    }
    let quads = points.iter().map(|&(a, b)| grid_quad(a, b)).collect::<Result<Vec<_>, _>>()?;
    let results = solve_all(&quads, s)?;
    let mut rep = GridReport::new("recip-grid", &["x", "y", "f", "log10(|f|+1e-10)"])
        .param("x", grid_span(xs))
        .param("y", grid_span(ys))
        .param("grid", format!("{}x{}", xs.len(), ys.len()))
        .param("tol", format_sig9(s.tol))
        .with_budget(s.budget);
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    for &x in xs {
        for &y in ys {
            let forward = results[index[&(x.to_bits(), y.to_bits())]].clone();
            let swapped = results[index[&(y.to_bits(), x.to_bits())]].clone();
            let f = forward.modulus - 1.0 / swapped.modulus;
            rep.push_row(vec![x, y, f, (f.abs() + LOG_FLOOR).log10()])?;
            cells.push(RecipCell { x, y, forward, swapped, f });
        }
    }
    Ok((rep, cells))
}

/// One point of the parallelogram grid.
#[derive(Debug, Clone)]
pub struct ParallelogramCell {
    pub t: f64,
    pub h: f64,
    pub exact: f64,
    pub fem: ModulusResult64,
}

/// Exact and finite element moduli of the parallelograms over `ts × hs`
/// (`t` outer).
pub fn parallelogram_grid(
    ts: &[f64],
    hs: &[f64],
    s: &SolveSettings,
) -> Result<(GridReport, Vec<ParallelogramCell>), CliError> {
    if let Some(t) = ts.iter().find(|&&t| !(t > 0.0 && t < FRAC_PI_2)) {
        return Err(CliError::Input(format!("t = {t} outside (0, π/2)")));
    }
    if let Some(h) = hs.iter().find(|&&h| !((0.5..=2.0).contains(&h))) {
        return Err(CliError::Input(format!("h = {h} outside [1/2, 2]")));
    }
    let pairs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| hs.iter().map(move |&h| (t, h))).collect();
    let quads = pairs.iter().map(|&(t, h)| parallelogram(t, h)).collect::<Result<Vec<_>, _>>()?;
    let results = solve_all(&quads, s)?;
    let mut rep = GridReport::new("parallelogram", &["t", "h", "g_exact", "g_fem", "log10(|g_exact-g_fem|+1e-10)"])
        .param("t", grid_span(ts))
        .param("h", grid_span(hs))
        .param("grid", format!("{}x{}", ts.len(), hs.len()))
        .param("tol", format_sig9(s.tol))
        .with_budget(s.budget);
    let mut cells = Vec::with_capacity(pairs.len());
    for (&(t, h), fem) in pairs.iter().zip(results) {
        let exact = parallelogram_modulus(t, h)?;
        rep.push_row(vec![t, h, exact, fem.modulus, ((exact - fem.modulus).abs() + LOG_FLOOR).log10()])?;
        cells.push(ParallelogramCell { t, h, exact, fem });
    }
    Ok((rep, cells))
}

/// `h = 1.1, 1.2, …, 2.0`.
pub fn default_trapezoid_heights() -> Vec<f64> {
    (11..=20).map(|k| k as f64 / 10.0).collect()
}

/// Finite element moduli of the trapezoids against Bowman's formula.
pub fn trapezoid_table(hs: &[f64], s: &SolveSettings) -> Result<(GridReport, Vec<ModulusResult64>), CliError> {
    let quads = hs.iter().map(|&h| trapezoid(h)).collect::<Result<Vec<_>, _>>()?;
    let exact = hs.iter().map(|&h| Ok(bowman_modulus(h)?.value)).collect::<Result<Vec<_>, CliError>>()?;
    let results = solve_all(&quads, s)?;
    let mut rep = GridReport::new("trapezoid-table", &["h", "fem", "bowman", "error", "reciprocal_defect"])
        .param("h", list(hs))
        .param("tol", format_sig9(s.tol))
        .with_budget(s.budget);
    for ((&h, r), b) in hs.iter().zip(&results).zip(exact) {
        rep.push_row(vec![h, r.modulus, b, (r.modulus - b).abs(), r.reciprocal_defect])?;
    }
    Ok((rep, results))
}

/// `θ = 0.10, 0.15, …, 1.20`.
pub fn default_circular_thetas() -> Vec<f64> {
    (2..=24).map(|k| k as f64 * 0.05).collect()
}

/// Finite element moduli of polygonal circular quadrilaterals against the
/// exact modulus of the curved domain.
pub fn circular_table(
    thetas: &[f64],
    r: f64,
    s: &SolveSettings,
) -> Result<(GridReport, Vec<ModulusResult64>), CliError> {
    let quads =
        thetas.iter().map(|&t| discretize_circular_quad(t, r, s.arc_segments)).collect::<Result<Vec<_>, _>>()?;
    let exact = thetas
        .iter()
        .map(|&t| Ok(circular_quad_modulus(&CircularQuadParams::new(t, r)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let results = solve_all(&quads, s)?;
    let mut rep = GridReport::new("circular-table", &["theta", "fem", "exact", "error", "reciprocal_defect"])
        .param("theta", list(thetas))
        .param("r", format_sig9(r))
        .param("arc_segments", s.arc_segments)
        .param("tol", format_sig9(s.tol))
        .with_budget(s.budget);
    for ((&t, res), e) in thetas.iter().zip(&results).zip(exact) {
        rep.push_row(vec![t, res.modulus, e, (res.modulus - e).abs(), res.reciprocal_defect])?;
    }
    Ok((rep, results))
}

/// `μ_a(r)` on `r = k/(steps+1)` for each `a`, with the product
/// `μ_a(r) μ_a(r')` that is constant in `r`.
pub fn mu_plot(a_list: &[f64], r_steps: usize) -> Result<GridReport, CliError> {
    if let Some(a) = a_list.iter().find(|&&a| !(a > 0.0 && a <= 0.5)) {
        return Err(CliError::Input(format!("a = {a} outside (0, 1/2]")));
    }
    if r_steps == 0 {
        return Err(CliError::Input("need at least one r value".into()));
    }
    let mut rep = GridReport::new("mu-plot", &["a", "r", "mu", "product"])
        .param("a", list(a_list))
        .param("r_steps", r_steps);
    for &a in a_list {
        for r in interior_grid(0.0, 1.0, r_steps) {
            let pair = EllipticModulusPair::from_r(r);
            let m = mu_pair(a, &pair)?;
            rep.push_row(vec![a, r, m, m * mu_pair(a, &pair.swapped())?])?;
        }
    }
    Ok(rep)
}

fn grid_span(v: &[f64]) -> String {
    match (v.first(), v.last()) {
        (Some(&a), Some(&b)) => format!("{}..{}", format_sig9(a), format_sig9(b)),
        _ => "empty".into(),
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|&x| format_sig9(x)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(half_open_grid(0.5, 3.0, 5), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(closed_grid(0.5, 2.0, 16)[5], 1.0);
        assert_eq!(closed_grid(1.0, 2.0, 1), vec![1.0]);
        assert_eq!(interior_grid(0.0, 1.0, 3), vec![0.25, 0.5, 0.75]);
        assert_eq!(default_trapezoid_heights().len(), 10);
        let th = default_circular_thetas();
        assert_eq!(th.len(), 23);
        assert!((th[0] - 0.1).abs() < 1e-15 && (th[22] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn mu_plot_rows() {
        let rep = mu_plot(&[0.5, 0.25], 9).unwrap();
        assert_eq!(rep.rows().len(), 18);
        let mu = rep.column("mu").unwrap();
        assert!(mu[..9].windows(2).all(|w| w[1] < w[0]));
        let prod = rep.column("product").unwrap();
        assert!(prod[..9].iter().all(|p| (p - prod[0]).abs() < 1e-12 * prod[0]));
        assert!(mu_plot(&[0.6], 9).is_err());
    }

    #[test]
    fn small_recip_grid() {
        let s = SolveSettings { budget: 3_000, ..SolveSettings::default() };
        let (rep, cells) = recip_grid(&[1.0, 2.0], &[1.0, 2.0], &s).unwrap();
        assert_eq!(rep.rows().len(), 4);
        // the diagonal point is a symmetric quadrilateral of modulus 1
        assert!((cells[0].forward.modulus - 1.0).abs() < 1e-3);
        assert!(cells.iter().all(|c| c.f.abs() < 1e-2));
        assert!(recip_grid(&[0.0], &[1.0], &s).is_err());
    }
}
