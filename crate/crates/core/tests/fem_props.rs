use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadmod::exact::{bowman_modulus, parallelogram_modulus};
use quadmod::fem::{compute_modulus, solve_cg, solve_on_mesh, SparseSystem};
use quadmod::geometry::{parallelogram, quad_from_corners, trapezoid, Point, PolygonQuad};
use quadmod::mesh::triangulate;

fn rect(h: f64) -> PolygonQuad<f64> {
    quad_from_corners(Point::new(1.0, h), Point::new(0.0, h), Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap()
}

/// Dense Cholesky solve, the reference for CG.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            l[i][j] = if i == j { (a[i][i] - s).sqrt() } else { (a[i][j] - s) / l[j][j] };
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    x
}

#[test]
fn cg_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let b: Vec<Vec<f64>> = (0..10).map(|_| (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let a: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                (0..10)
                    .map(|j| (0..10).map(|k| b[k][i] * b[k][j]).sum::<f64>() + if i == j { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_cg(&SparseSystem::from_dense(&a, rhs.clone()), 1e-13).unwrap();
        for (u, v) in x.iter().zip(cholesky_solve(&a, &rhs)) {
            assert!((u - v).abs() <= 1e-9, "{u} vs {v}");
        }
    }
}

#[test]
fn rectangles_are_exact() {
    let r = compute_modulus(&rect(1.0), 2_000, 1e-12).unwrap();
    assert!((r.modulus - 1.0).abs() <= 1e-6);
    let r = compute_modulus(&rect(2.0), 2_000, 1e-12).unwrap();
    assert!((r.modulus - 2.0).abs() <= 1e-5);
    assert!((r.energy_primal - 2.0).abs() <= 1e-9);
    assert!((r.energy_dual - 0.5).abs() <= 1e-9);
}

#[test]
fn square_symmetry_under_corner_relabelling() {
    // listing the corners from z2 swaps the two problems
    let q = rect(1.0);
    let v = q.vertices();
    let shifted = quad_from_corners(v[1], v[2], v[3], v[0]).unwrap();
    let a = compute_modulus(&q, 2_000, 1e-12).unwrap();
    let b = compute_modulus(&shifted, 2_000, 1e-12).unwrap();
    assert!((a.modulus * b.modulus - 1.0).abs() <= 1e-6);
    assert!((a.modulus - 1.0).abs() <= 1e-6);
}

#[test]
fn trapezoid_and_parallelogram_agree_with_closed_forms() {
    let r = compute_modulus(&trapezoid(1.1f64).unwrap(), 40_000, 1e-10).unwrap();
    let exact = bowman_modulus(1.1).unwrap().value;
    assert!((r.modulus - exact).abs() <= 1e-4, "{} vs {exact}", r.modulus);
    assert!(r.reciprocal_defect <= 5e-4);

    let r = compute_modulus(&parallelogram(1.0f64, 1.5).unwrap(), 40_000, 1e-10).unwrap();
    let exact = parallelogram_modulus(1.0, 1.5).unwrap();
    assert!((r.modulus - exact).abs() <= 1e-4, "{} vs {exact}", r.modulus);
}

#[test]
fn maximum_principle_and_monotone_energies() {
    for q in [trapezoid(1.3).unwrap(), parallelogram(0.8, 1.2).unwrap()] {
        let r = compute_modulus(&q, 20_000, 1e-10).unwrap();
        let (lo, hi) = r.solution_range;
        assert!(lo >= -1e-10 && hi <= 1.0 + 1e-10, "{lo} {hi}");
        for w in r.levels.windows(2) {
            assert!(w[1].energy_primal <= w[0].energy_primal + 1e-12);
            assert!(w[1].energy_dual <= w[0].energy_dual + 1e-12);
        }
        let first = &r.levels[0];
        let last = r.levels.last().unwrap();
        assert!(last.eta < first.eta);
        let defect = |l: &quadmod::fem::LevelRecord<f64>| (l.energy_primal * l.energy_dual - 1.0).abs();
        assert!(defect(last) < defect(first));
        assert!(r.dofs <= 20_000 && r.dofs == last.dofs);
    }
}

#[test]
fn similarity_invariance() {
    let q = trapezoid(1.5f64).unwrap();
    let base = compute_modulus(&q, 40_000, 1e-10).unwrap().modulus;
    for (s, phi, shift) in [(3.7, 0.0, Point::new(0.0, 0.0)), (0.2, 0.9, Point::new(-4.0, 2.5)), (1.0, 2.5, Point::new(1.0, 1.0))] {
        let moved = q.transformed(s, phi, shift).unwrap();
        let m = compute_modulus(&moved, 40_000, 1e-10).unwrap().modulus;
        assert!((m - base).abs() <= 1e-6, "s = {s}, phi = {phi}: {m} vs {base}");
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let q = parallelogram(0.7, 1.4).unwrap();
    let a = compute_modulus(&q, 10_000, 1e-10).unwrap();
    let b = compute_modulus(&q, 10_000, 1e-10).unwrap();
    assert_eq!(a, b);
}

#[test]
fn solve_on_fixed_mesh() {
    let q = trapezoid(2.0).unwrap();
    let mesh = triangulate(&q, 0.01).unwrap();
    let s = solve_on_mesh(&mesh, 1e-10, None).unwrap();
    // the discrete energies bound the true values from above
    let exact = bowman_modulus(2.0).unwrap().value;
    assert!(s.energy_primal > exact && s.energy_dual > 1.0 / exact);
}

#[test]
fn single_precision_instantiation() {
    let q = quad_from_corners(
        Point::new(1.0f32, 2.0),
        Point::new(0.0, 2.0),
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
    )
    .unwrap();
    let r = compute_modulus(&q, 2_000, 1e-5).unwrap();
    assert!((r.modulus - 2.0).abs() < 1e-3);
}
