//! Polygonal quadrilaterals: validation, the parametric families used in the
//! experiments, and the plain-text polygon file format.
//!
//! Polygon file format (whitespace-delimited, `#` starts a comment line):
//!
//! ```text
//! m k1 k2 k3 k4
//! x0 y0
//! ...
//! x(m-1) y(m-1)
//! ```
//!
//! `m` is the vertex count and `k1 < k2 < k3 < k4` are the zero-based vertex
//! indices of the corners `z1..z4`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Self { x: T::lit(x), y: T::lit(y) }
    }

    /// `r e^{iφ}`.
    pub fn polar(r: T, phi: T) -> Self {
        Self { x: r * phi.cos(), y: r * phi.sin() }
    }

    pub fn sub(self, o: Self) -> Self {
        Self { x: self.x - o.x, y: self.y - o.y }
    }

    pub fn add(self, o: Self) -> Self {
        Self { x: self.x + o.x, y: self.y + o.y }
    }

    pub fn scale(self, s: T) -> Self {
        Self { x: self.x * s, y: self.y * s }
    }

    pub fn midpoint(self, o: Self) -> Self {
        let half = T::lit(0.5);
        Self { x: (self.x + o.x) * half, y: (self.y + o.y) * half }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> T {
        self.sub(o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Twice the signed area of triangle `abc` (positive when counter-clockwise).
pub fn orient<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> T {
    b.sub(a).cross(c.sub(a))
}

/// Shoelace signed area of a closed polygon.
pub fn signed_area<T: Scalar>(pts: &[Point<T>]) -> T {
    let n = pts.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + pts[i].cross(pts[(i + 1) % n]);
    }
    acc * T::lit(0.5)
}

/// The four boundary arcs `γ1..γ4` between consecutive corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arc {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
}

impl Arc {
    pub const ALL: [Arc; 4] = [Arc::Gamma1, Arc::Gamma2, Arc::Gamma3, Arc::Gamma4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Arc {
        Self::ALL[i % 4]
    }

    /// The arc label seen from the conjugate quadrilateral `(z2, z3, z4, z1)`.
    pub fn conjugate(self) -> Arc {
        Self::from_index(self.index() + 3)
    }
}

/// A simple, positively oriented polygon with four marked corners.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonQuad<T> {
    vertices: Vec<Point<T>>,
    corners: [usize; 4],
}

impl<T: Scalar> PolygonQuad<T> {
    /// Validates and wraps a polygon; never reorders or reverses the input.
    pub fn new(vertices: Vec<Point<T>>, corners: [usize; 4]) -> Result<Self> {
        let m = vertices.len();
        if m < 4 {
            return Err(Error::Geometry(format!("need at least 4 vertices, got {m}")));
        }
        if corners[3] >= m || !corners.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Geometry(format!(
                "corner indices {corners:?} must be strictly increasing and below {m}"
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::Geometry(format!("vertex {i} is not finite")));
        }
        check_simple(&vertices)?;
        if !(signed_area(&vertices) > T::zero()) {
            return Err(Error::Geometry("polygon is not positively oriented".into()));
        }
        Ok(Self { vertices, corners })
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn corners(&self) -> [usize; 4] {
        self.corners
    }

    pub fn corner_points(&self) -> [Point<T>; 4] {
        self.corners.map(|k| self.vertices[k])
    }

    pub fn area(&self) -> T {
        signed_area(&self.vertices)
    }

    /// Arc on which the boundary edge `(i, i+1)` lies.
    pub fn edge_arc(&self, i: usize) -> Arc {
        let c = self.corners;
        if i >= c[0] && i < c[1] {
            Arc::Gamma1
        } else if i >= c[1] && i < c[2] {
            Arc::Gamma2
        } else if i >= c[2] && i < c[3] {
            Arc::Gamma3
        } else {
            Arc::Gamma4
        }
    }

    /// Applies a similarity `z ↦ s e^{iφ} z + shift`; the modulus is invariant.
    pub fn transformed(&self, scale: T, rotation: T, shift: Point<T>) -> Result<Self> {
        let (s, c) = rotation.sin_cos();
        let verts = self
            .vertices
            .iter()
            .map(|p| Point::new(p.x * c - p.y * s, p.x * s + p.y * c).scale(scale).add(shift))
            .collect();
        Self::new(verts, self.corners)
    }

    /// Parses the plain-text polygon format described in the module docs.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, what: &str| Error::Geometry(format!("line {}: {what}", line + 1));

        let (hl, header) = lines.next().ok_or_else(|| Error::Geometry("empty polygon file".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(hl, "header must be `m k1 k2 k3 k4`"))?;
        let [m, k1, k2, k3, k4] = nums[..] else {
            return Err(bad(hl, "header must have exactly five integers"));
        };

        let mut vertices = Vec::with_capacity(m);
        for (ln, line) in lines {
            let coords: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(ln, "vertex line must be `x y`"))?;
            let [x, y] = coords[..] else {
                return Err(bad(ln, "vertex line must have exactly two numbers"));
            };
            vertices.push(Point::from_f64(x, y));
        }
        if vertices.len() != m {
            return Err(Error::Geometry(format!("header announces {m} vertices, found {}", vertices.len())));
        }
        Self::new(vertices, [k1, k2, k3, k4])
    }

    pub fn to_text(&self) -> String {
        let [k1, k2, k3, k4] = self.corners;
        let mut out = format!("{} {k1} {k2} {k3} {k4}\n", self.vertices.len());
        for p in &self.vertices {
            let _ = writeln!(out, "{:e} {:e}", p.x.as_f64(), p.y.as_f64());
        }
        out
    }
}

fn segments_intersect<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    let zero = T::zero();
    if ((d1 > zero && d2 < zero) || (d1 < zero && d2 > zero)) && ((d3 > zero && d4 < zero) || (d3 < zero && d4 > zero)) {
        return true;
    }
    let on = |p: Point<T>, q: Point<T>, r: Point<T>| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    (d1 == zero && on(c, d, a))
        || (d2 == zero && on(c, d, b))
        || (d3 == zero && on(a, b, c))
        || (d4 == zero && on(a, b, d))
}

/// O(m²) pairwise edge test.
fn check_simple<T: Scalar>(v: &[Point<T>]) -> Result<()> {
    let m = v.len();
    for i in 0..m {
        let (a, b) = (v[i], v[(i + 1) % m]);
        if a == b {
            return Err(Error::Geometry(format!("repeated vertex at index {i}")));
        }
        // consecutive edges may only share their common vertex
        let c = v[(i + 2) % m];
        if orient(a, b, c) == T::zero() && b.sub(a).dot(c.sub(b)) < T::zero() {
            return Err(Error::Geometry(format!("boundary folds back at vertex {}", (i + 1) % m)));
        }
        for j in (i + 2)..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            if segments_intersect(a, b, v[j], v[(j + 1) % m]) {
                return Err(Error::Geometry(format!("edges {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}

/// The straight-sided quadrilateral `QM(z1, z2, z3, z4)`.
pub fn quad_from_corners<T: Scalar>(z1: Point<T>, z2: Point<T>, z3: Point<T>, z4: Point<T>) -> Result<PolygonQuad<T>> {
    PolygonQuad::new(vec![z1, z2, z3, z4], [0, 1, 2, 3])
}

/// `(1 + h e^{it}, h e^{it}, 0, 1)`.
pub fn parallelogram<T: Scalar>(t: T, h: T) -> Result<PolygonQuad<T>> {
    if !(t > T::zero() && t <= T::FRAC_PI_2()) {
        return Err(Error::Geometry(format!("parallelogram angle t = {t} outside (0, π/2]")));
    }
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::Geometry(format!("parallelogram side h = {h} must be positive")));
    }
    let top = Point::polar(h, t);
    let one = Point::new(T::one(), T::zero());
    quad_from_corners(top.add(one), top, Point::default(), one)
}

/// `(1 + ih, i(h-1), 0, 1)`.
pub fn trapezoid<T: Scalar>(h: T) -> Result<PolygonQuad<T>> {
    if !(h > T::one() && h.is_finite()) {
        return Err(Error::Geometry(format!("trapezoid needs h > 1, got {h}")));
    }
    let (zero, one) = (T::zero(), T::one());
    quad_from_corners(
        Point::new(one, h),
        Point::new(zero, h - one),
        Point::new(zero, zero),
        Point::new(one, zero),
    )
}

/// Circle by centre and radius.
#[derive(Debug, Clone, Copy)]
struct Circle<T> {
    center: Point<T>,
    radius: T,
}

/// Intersection of two circles lying in the closed first quadrant.
fn first_quadrant_intersection<T: Scalar>(c1: Circle<T>, c2: Circle<T>) -> Option<Point<T>> {
    let d = c2.center.sub(c1.center);
    let dist = d.norm();
    if !(dist > T::zero()) {
        return None;
    }
    let along = (dist * dist + c1.radius * c1.radius - c2.radius * c2.radius) / (dist + dist);
    let h2 = c1.radius * c1.radius - along * along;
    if h2 < T::zero() {
        return None;
    }
    let h = h2.sqrt();
    let base = c1.center.add(d.scale(along / dist));
    let perp = Point::new(-d.y, d.x).scale(h / dist);
    [base.add(perp), base.sub(perp)]
        .into_iter()
        .filter(|p| p.x >= T::zero() && p.y >= T::zero())
        .min_by(|p, q| p.norm().partial_cmp(&q.norm()).unwrap_or(std::cmp::Ordering::Equal))
}

/// Corners `[a, b, c, d]` (quadrants II, III, IV, I) of the circular
/// quadrilateral and the four circles carrying its sides `γ1..γ4`.
fn circular_quad_frame<T: Scalar>(theta: T, r: T) -> Result<([Point<T>; 4], [Circle<T>; 4])> {
    if !(theta > T::zero() && theta < T::FRAC_PI_2()) {
        return Err(Error::Geometry(format!("theta = {theta} outside (0, π/2)")));
    }
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::Geometry(format!("r = {r} outside (0, 1)")));
    }
    let zero = T::zero();
    let two = T::lit(2.0);
    // orthogonal to the unit circle at e^{iθ} and e^{i(π-θ)}
    let arc_radius = theta.cos() / theta.sin();
    let upper = Circle { center: Point::new(zero, theta.sin().recip()), radius: arc_radius };
    let lower = Circle { center: Point::new(zero, -theta.sin().recip()), radius: arc_radius };
    // through r, i, -i and through -r, i, -i
    let offset = (T::one() - r * r) / (two * r);
    let side_radius = (T::one() + r * r) / (two * r);
    let right = Circle { center: Point::new(-offset, zero), radius: side_radius };
    let left = Circle { center: Point::new(offset, zero), radius: side_radius };

    let d = first_quadrant_intersection(upper, right)
        .filter(|p| p.norm() < T::one())
        .ok_or_else(|| Error::Geometry(format!("arcs do not meet inside the disk for theta = {theta}, r = {r}")))?;
    if !(d.x > zero && d.y > zero) {
        return Err(Error::Geometry("degenerate corner on an axis".into()));
    }
    let corners = [
        Point::new(-d.x, d.y),
        Point::new(-d.x, -d.y),
        Point::new(d.x, -d.y),
        d,
    ];
    Ok((corners, [left, lower, right, upper]))
}

/// Corner `d` (first quadrant) of the circular quadrilateral.
pub fn circular_quad_corner<T: Scalar>(theta: T, r: T) -> Result<Point<T>> {
    circular_quad_frame(theta, r).map(|(c, _)| c[3])
}

/// Polygonal approximation of the circular quadrilateral with `n` chords per
/// side, sampled at uniform angular steps between the exact corners.
///
/// The result has `4n` vertices and corners `[0, n, 2n, 3n]`.
pub fn discretize_circular_quad<T: Scalar>(theta: T, r: T, n: usize) -> Result<PolygonQuad<T>> {
    if n < 2 {
        return Err(Error::Geometry(format!("need at least 2 segments per arc, got {n}")));
    }
    let (corners, circles) = circular_quad_frame(theta, r)?;
    let nn = T::from_usize_lossy(n);
    let mut vertices = Vec::with_capacity(4 * n);
    for side in 0..4 {
        let (from, to) = (corners[side], corners[(side + 1) % 4]);
        let circle = circles[side];
        let start = from.sub(circle.center);
        let end = to.sub(circle.center);
        let phi0 = start.y.atan2(start.x);
        let mut sweep = end.y.atan2(end.x) - phi0;
        if sweep > T::PI() {
            sweep = sweep - T::PI() - T::PI();
        } else if sweep < -T::PI() {
            sweep = sweep + T::PI() + T::PI();
        }
        vertices.push(from);
        for k in 1..n {
            let phi = phi0 + sweep * T::from_usize_lossy(k) / nn;
            vertices.push(circle.center.add(Point::polar(circle.radius, phi)));
        }
    }
    PolygonQuad::new(vertices, [0, n, 2 * n, 3 * n])
}
