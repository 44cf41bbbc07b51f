use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use quadmod::geometry::{discretize_circular_quad, parallelogram, quad_from_corners, trapezoid, Point, PolygonQuad};

/// The upper and lower arcs bow into the region and the side arcs bow out,
/// so the chord error has no fixed sign; the area converges at O(n⁻²).
#[test]
fn circular_area_converges_under_doubling() {
    for theta in [0.1, 0.3, 0.6, 1.2] {
        let areas: Vec<f64> =
            [4, 8, 16, 32, 64, 128].iter().map(|&n| discretize_circular_quad(theta, 0.4, n).unwrap().area()).collect();
        let diffs: Vec<f64> = areas.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for w in diffs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 3.5 && ratio < 4.5, "theta = {theta}: ratio {ratio}");
        }
        assert!(diffs[diffs.len() - 1] < 1e-4 * areas[0]);
    }
}

#[test]
fn polygon_file_round_trip() {
    let q = discretize_circular_quad(0.4, 0.5, 7).unwrap();
    let back = PolygonQuad::<f64>::parse_text(&q.to_text()).unwrap();
    assert_eq!(back.corners(), q.corners());
    for (a, b) in back.vertices().iter().zip(q.vertices()) {
        assert!(a.dist(*b) == 0.0);
    }
}

proptest! {
    #[test]
    fn reciprocal_grid_quads_are_valid(x in 0.01f64..=3.0, y in 0.01f64..=3.0) {
        let q = quad_from_corners(Point::new(x, y), Point::new(0.0, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap();
        prop_assert!(q.area() > 0.0);
    }

    #[test]
    fn parallelograms_are_valid(t in 0.01f64..=FRAC_PI_2, h in 0.1f64..3.0) {
        let q = parallelogram(t, h).unwrap();
        prop_assert!((q.area() - h * t.sin()).abs() < 1e-12);
    }

    #[test]
    fn trapezoids_are_valid(h in 1.001f64..5.0) {
        let q = trapezoid(h).unwrap();
        prop_assert!((q.area() - (h - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn circular_quads_are_valid(theta in 0.05f64..1.5, r in 0.05f64..0.95, n in 2usize..40) {
        let q = discretize_circular_quad(theta, r, n).unwrap();
        prop_assert_eq!(q.vertices().len(), 4 * n);
        prop_assert!(q.vertices().iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }
}
