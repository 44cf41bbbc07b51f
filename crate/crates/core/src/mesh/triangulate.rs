//! Initial triangulation: ear clipping, Lawson flips to the constrained
//! Delaunay triangulation, then Delaunay refinement (circumcentre insertion
//! with encroached-segment splitting) until every triangle meets the area
//! bound and the minimum-angle target.

use std::collections::HashMap;

use super::{min_angle, BoundaryEdge, TriMesh};
use crate::error::{Error, Result};
use crate::geometry::{orient, Arc, Point, PolygonQuad};
use crate::scalar::Scalar;

/// Minimum-angle target for the initial mesh.
pub const MIN_ANGLE_DEG: f64 = 20.0;

/// Input corners sharper than this get concentric-shell segment splits, and
/// triangles whose smallest angle sits inside such a corner are exempt from
/// the angle test (no triangulation can beat the input angle there).
const SMALL_INPUT_ANGLE_DEG: f64 = 60.0;

const NONE: usize = usize::MAX;

/// Triangulates the interior of `q` with every triangle of area at most
/// `max_area` and smallest angle at least [`MIN_ANGLE_DEG`] (except in
/// wedges of input corners sharper than 60°).
///
/// All polygon vertices are kept; Steiner points added on a boundary edge
/// inherit that edge's arc label.
pub fn triangulate<T: Scalar>(q: &PolygonQuad<T>, max_area: T) -> Result<TriMesh<T>> {
    if !(max_area > T::zero()) {
        return Err(Error::Mesh(format!("max_area must be positive, got {max_area}")));
    }
    let mut cdt = Cdt::from_polygon(q)?;
    cdt.make_delaunay();
    let vertex_cap = 4 * q.vertices().len() + 64 * ((q.area() / max_area).as_f64().ceil() as usize) + 1_000_000;
    cdt.refine(max_area, vertex_cap)?;
    cdt.into_mesh()
}

#[derive(Debug, Clone, Copy)]
struct Side {
    nbr: usize,
    seg: Option<Arc>,
}

/// Triangulation under construction. Edge `k` of a triangle is the edge
/// opposite its local vertex `k`.
struct Cdt<T> {
    pts: Vec<Point<T>>,
    tri: Vec<[usize; 3]>,
    side: Vec<[Side; 3]>,
    alive: Vec<bool>,
    /// interior angle (radians) at input vertices, `None` for Steiner points
    input_angle: Vec<Option<T>>,
}

struct RimEdge {
    a: usize,
    b: usize,
    outer: Side,
    owner: usize,
}

enum Located {
    Inside(usize),
    Blocked(usize, usize),
}

fn incircle<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> (T, T) {
    let (ad, bd, cd) = (a.sub(d), b.sub(d), c.sub(d));
    let (la, lb, lc) = (ad.dot(ad), bd.dot(bd), cd.dot(cd));
    let (x, y, z) = (bd.cross(cd), cd.cross(ad), ad.cross(bd));
    let det = la * x + lb * y + lc * z;
    let scale = la * x.abs() + lb * y.abs() + lc * z.abs();
    (det, scale)
}

/// `d` strictly inside the circumcircle of counter-clockwise `abc`, with a
/// relative margin so cocircular points never flip back and forth.
fn in_circle_strict<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>, d: Point<T>) -> bool {
    let (det, scale) = incircle(a, b, c, d);
    det > T::lit(1e-12) * scale
}

fn circumcenter<T: Scalar>(a: Point<T>, b: Point<T>, c: Point<T>) -> Point<T> {
    let (ba, ca) = (b.sub(a), c.sub(a));
    let d = T::lit(2.0) * ba.cross(ca);
    let (lb, lc) = (ba.dot(ba), ca.dot(ca));
    a.add(Point::new((ca.y * lb - ba.y * lc) / d, (ba.x * lc - ca.x * lb) / d))
}

/// `p` lies strictly inside the diametral circle of segment `ab`.
fn encroaches<T: Scalar>(a: Point<T>, b: Point<T>, p: Point<T>) -> bool {
    a.sub(p).dot(b.sub(p)) < T::zero()
}

impl<T: Scalar> Cdt<T> {
    fn from_polygon(q: &PolygonQuad<T>) -> Result<Self> {
        let pts = q.vertices().to_vec();
        let m = pts.len();
        let input_angle = (0..m)
            .map(|i| {
                let (p, c, n) = (pts[(i + m - 1) % m], pts[i], pts[(i + 1) % m]);
                let (u, v) = (n.sub(c), p.sub(c));
                // counter-clockwise sweep from the outgoing to the incoming edge
                let mut ang = u.cross(v).atan2(u.dot(v));
                if ang < T::zero() {
                    ang = ang + T::PI() + T::PI();
                }
                Some(ang)
            })
            .collect();
        let tris = ear_clip(&pts)?;

        let mut cdt = Cdt { pts, tri: Vec::new(), side: Vec::new(), alive: Vec::new(), input_angle };
        let boundary: HashMap<(usize, usize), Arc> = (0..m).map(|i| ((i, (i + 1) % m), q.edge_arc(i))).collect();
        let mut owner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for tri in tris {
            let t = cdt.push(tri);
            for k in 0..3 {
                let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
                if let Some(&(u, j)) = owner.get(&(b, a)) {
                    cdt.side[t][k].nbr = u;
                    cdt.side[u][j].nbr = t;
                } else {
                    owner.insert((a, b), (t, k));
                }
                cdt.side[t][k].seg = boundary.get(&(a, b)).copied();
            }
        }
        for t in 0..cdt.tri.len() {
            for k in 0..3 {
                if (cdt.side[t][k].nbr == NONE) != cdt.side[t][k].seg.is_some() {
                    return Err(Error::Mesh("ear clipping produced a non-conforming triangulation".into()));
                }
            }
        }
        Ok(cdt)
    }

    fn push(&mut self, tri: [usize; 3]) -> usize {
        self.tri.push(tri);
        self.side.push([Side { nbr: NONE, seg: None }; 3]);
        self.alive.push(true);
        self.tri.len() - 1
    }

    fn p(&self, v: usize) -> Point<T> {
        self.pts[v]
    }

    fn corners(&self, t: usize) -> [Point<T>; 3] {
        self.tri[t].map(|v| self.pts[v])
    }

    fn edge(&self, t: usize, k: usize) -> (usize, usize) {
        (self.tri[t][(k + 1) % 3], self.tri[t][(k + 2) % 3])
    }

    /// Local index in `u` of the edge shared with `t`.
    fn back_index(&self, u: usize, t: usize) -> usize {
        (0..3).find(|&j| self.side[u][j].nbr == t).expect("adjacency is symmetric")
    }

    fn relink(&mut self, nbr: usize, old: usize, new: usize) {
        if nbr != NONE {
            let j = self.back_index(nbr, old);
            self.side[nbr][j].nbr = new;
        }
    }

    /// Flips the interior edge `k` of `t` if it is not locally Delaunay.
    fn flip_if_illegal(&mut self, t: usize, k: usize) -> bool {
        let u = self.side[t][k].nbr;
        if u == NONE || self.side[t][k].seg.is_some() {
            return false;
        }
        let j = self.back_index(u, t);
        let [a, b, c] = [self.tri[t][k], self.tri[t][(k + 1) % 3], self.tri[t][(k + 2) % 3]];
        let d = self.tri[u][j];
        if !in_circle_strict(self.p(a), self.p(b), self.p(c), self.p(d)) {
            return false;
        }
        if !(orient(self.p(a), self.p(b), self.p(d)) > T::zero() && orient(self.p(a), self.p(d), self.p(c)) > T::zero()) {
            return false;
        }
        // t = (a, b, c), u = (d, c, b) -> t = (a, b, d), u = (a, d, c)
        let s_ab = self.side[t][(k + 2) % 3];
        let s_ca = self.side[t][(k + 1) % 3];
        let s_bd = self.side[u][(j + 1) % 3];
        let s_dc = self.side[u][(j + 2) % 3];
        debug_assert_eq!(self.tri[u][(j + 1) % 3], c);
        self.tri[t] = [a, b, d];
        self.side[t] = [s_bd, Side { nbr: u, seg: None }, s_ab];
        self.tri[u] = [a, d, c];
        self.side[u] = [s_dc, s_ca, Side { nbr: t, seg: None }];
        self.relink(s_bd.nbr, u, t);
        self.relink(s_ca.nbr, t, u);
        true
    }

    fn make_delaunay(&mut self) {
        let mut stack: Vec<(usize, usize)> = (0..self.tri.len()).flat_map(|t| (0..3).map(move |k| (t, k))).collect();
        let mut budget = 64 * stack.len() + 1024;
        while let Some((t, k)) = stack.pop() {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let u = self.side[t][k].nbr;
            if self.flip_if_illegal(t, k) {
                for tt in [t, u] {
                    for kk in 0..3 {
                        stack.push((tt, kk));
                    }
                }
            }
        }
    }

    fn locate(&self, start: usize, p: Point<T>) -> Located {
        let mut t = start;
        let mut came_from = NONE;
        for _ in 0..(4 * self.tri.len() + 64) {
            let mut moved = false;
            for k in 0..3 {
                let (a, b) = self.edge(t, k);
                if orient(self.p(a), self.p(b), p) < T::zero() {
                    let nbr = self.side[t][k].nbr;
                    if nbr == NONE {
                        return Located::Blocked(t, k);
                    }
                    if nbr == came_from {
                        continue;
                    }
                    came_from = t;
                    t = nbr;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Located::Inside(t);
            }
        }
        Located::Inside(t)
    }

    /// Bowyer–Watson cavity of `p` grown from `start`: the cavity triangles
    /// and the rim edges bounding it.
    fn cavity(&self, start: usize, p: Point<T>) -> (Vec<usize>, Vec<RimEdge>) {
        let mut inside = vec![start];
        let mut mark: HashMap<usize, bool> = HashMap::from([(start, true)]);
        let mut i = 0;
        while i < inside.len() {
            let t = inside[i];
            i += 1;
            for k in 0..3 {
                let s = self.side[t][k];
                if s.nbr == NONE || mark.contains_key(&s.nbr) {
                    continue;
                }
                let [a, b, c] = self.corners(s.nbr);
                let take = in_circle_strict(a, b, c, p);
                mark.insert(s.nbr, take);
                if take {
                    inside.push(s.nbr);
                }
            }
        }
        let mut rim = Vec::new();
        for &t in &inside {
            for k in 0..3 {
                let s = self.side[t][k];
                if s.nbr == NONE || !mark[&s.nbr] {
                    let (a, b) = self.edge(t, k);
                    rim.push(RimEdge { a, b, outer: s, owner: t });
                }
            }
        }
        (inside, rim)
    }

    /// Replaces the cavity by a fan around the new vertex `p`. `split` names
    /// the rim edge `p` lies on, which is dropped and whose label passes to
    /// its two halves. Returns the new triangles, or `None` (leaving the mesh
    /// untouched) if the fan would contain an inverted triangle.
    fn insert(&mut self, p: Point<T>, cavity: &[usize], rim: Vec<RimEdge>, split: Option<(usize, usize)>) -> Option<Vec<usize>> {
        let label = split.and_then(|(a, b)| rim.iter().find(|e| (e.a, e.b) == (a, b)).and_then(|e| e.outer.seg));
        let fan: Vec<RimEdge> = rim.into_iter().filter(|e| Some((e.a, e.b)) != split).collect();
        if fan.iter().any(|e| !(orient(p, self.p(e.a), self.p(e.b)) > T::zero())) {
            return None;
        }

        let v = self.pts.len();
        self.pts.push(p);
        self.input_angle.push(None);
        for &t in cavity {
            self.alive[t] = false;
        }
        let mut by_first: HashMap<usize, usize> = HashMap::new();
        let mut by_second: HashMap<usize, usize> = HashMap::new();
        let mut created = Vec::with_capacity(fan.len());
        for e in &fan {
            let t = self.push([v, e.a, e.b]);
            self.side[t][0] = e.outer;
            self.relink(e.outer.nbr, e.owner, t);
            by_first.insert(e.a, t);
            by_second.insert(e.b, t);
            created.push(t);
        }
        for &t in &created {
            let [_, a, b] = self.tri[t];
            // edge opposite a is (b, v): its partner starts at b
            self.side[t][1] = match by_first.get(&b) {
                Some(&u) => Side { nbr: u, seg: None },
                None => Side { nbr: NONE, seg: label },
            };
            // edge opposite b is (v, a): its partner ends at a
            self.side[t][2] = match by_second.get(&a) {
                Some(&u) => Side { nbr: u, seg: None },
                None => Side { nbr: NONE, seg: label },
            };
        }
        Some(created)
    }

    fn split_point(&self, a: usize, b: usize) -> Point<T> {
        let (pa, pb) = (self.p(a), self.p(b));
        let small = T::lit(SMALL_INPUT_ANGLE_DEG).to_radians();
        let sharp = |v: usize| self.input_angle[v].is_some_and(|ang| ang < small);
        let shell = |from: Point<T>, to: Point<T>| {
            let len = from.dist(to);
            let half = len * T::lit(0.5);
            let d = T::lit(2.0).powf(half.log2().round());
            let d = if d > T::lit(0.75) * len || d < T::lit(0.25) * len { half } else { d };
            from.add(to.sub(from).scale(d / len))
        };
        match (sharp(a) && self.input_angle[b].is_none(), sharp(b) && self.input_angle[a].is_none()) {
            (true, _) => shell(pa, pb),
            (_, true) => shell(pb, pa),
            _ => pa.midpoint(pb),
        }
    }

    fn split_segment(&mut self, t: usize, k: usize) -> Result<Vec<usize>> {
        let (a, b) = self.edge(t, k);
        let p = self.split_point(a, b);
        let (cavity, rim) = self.cavity(t, p);
        self.insert(p, &cavity, rim, Some((a, b)))
            .ok_or_else(|| Error::Mesh(format!("could not split boundary segment ({a}, {b})")))
    }

    fn encroached_segment(&self, t: usize) -> Option<usize> {
        (0..3).find(|&k| {
            self.side[t][k].seg.is_some() && {
                let (a, b) = self.edge(t, k);
                encroaches(self.p(a), self.p(b), self.p(self.tri[t][k]))
            }
        })
    }

    fn is_bad(&self, t: usize, max_area: T) -> bool {
        let [a, b, c] = self.corners(t);
        if orient(a, b, c) * T::lit(0.5) > max_area {
            return true;
        }
        let target = T::lit(MIN_ANGLE_DEG).to_radians();
        if min_angle(a, b, c) >= target {
            return false;
        }
        // exempt triangles whose small angle is an input corner that is
        // itself sharp
        let small = T::lit(SMALL_INPUT_ANGLE_DEG).to_radians();
        let tri = self.tri[t];
        let angle_at = |k: usize| {
            let (o, u, w) = (self.p(tri[k]), self.p(tri[(k + 1) % 3]), self.p(tri[(k + 2) % 3]));
            let (e1, e2) = (u.sub(o), w.sub(o));
            e1.cross(e2).abs().atan2(e1.dot(e2))
        };
        let k = (0..3)
            .min_by(|&i, &j| angle_at(i).partial_cmp(&angle_at(j)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        !self.input_angle[tri[k]].is_some_and(|ang| ang < small)
    }

    fn refine(&mut self, max_area: T, vertex_cap: usize) -> Result<()> {
        let mut seg_queue: Vec<usize> = (0..self.tri.len()).collect();
        let mut bad_queue: Vec<usize> = (0..self.tri.len()).rev().collect();
        let mut cursor = 0;
        loop {
            if self.pts.len() > vertex_cap {
                return Err(Error::Mesh(format!("refinement exceeded {vertex_cap} vertices")));
            }
            if let Some(t) = seg_queue.pop() {
                if !self.alive[t] {
                    continue;
                }
                if let Some(k) = self.encroached_segment(t) {
                    let created = self.split_segment(t, k)?;
                    seg_queue.extend(&created);
                    bad_queue.extend(&created);
                }
                continue;
            }
            let Some(t) = bad_queue.pop() else { break };
            if !self.alive[t] || !self.is_bad(t, max_area) {
                continue;
            }
            let [a, b, c] = self.corners(t);
            let cc = circumcenter(a, b, c);
            let created = match self.locate(t, cc) {
                Located::Blocked(tb, kb) => self.split_segment(tb, kb)?,
                Located::Inside(tc) => {
                    let (cavity, rim) = self.cavity(tc, cc);
                    let encroached: Vec<(usize, usize)> = rim
                        .iter()
                        .filter(|e| e.outer.seg.is_some() && encroaches(self.p(e.a), self.p(e.b), cc))
                        .map(|e| (e.a, e.b))
                        .collect();
                    if encroached.is_empty() {
                        match self.insert(cc, &cavity, rim, None) {
                            Some(created) => created,
                            // inverted fan: fall back to splitting the longest edge
                            None => {
                                let k = (0..3)
                                    .max_by(|&i, &j| {
                                        let li = { let (a, b) = self.edge(t, i); self.p(a).dist(self.p(b)) };
                                        let lj = { let (a, b) = self.edge(t, j); self.p(a).dist(self.p(b)) };
                                        li.partial_cmp(&lj).unwrap_or(std::cmp::Ordering::Equal)
                                    })
                                    .unwrap_or(0);
                                if self.side[t][k].nbr == NONE {
                                    self.split_segment(t, k)?
                                } else {
                                    cursor += 1;
                                    if cursor > 1000 {
                                        return Err(Error::Mesh("Delaunay refinement stalled".into()));
                                    }
                                    continue;
                                }
                            }
                        }
                    } else {
                        let mut created = Vec::new();
                        for (a, b) in encroached {
                            let Some((ts, ks)) = self.find_live_edge(a, b) else { continue };
                            created.extend(self.split_segment(ts, ks)?);
                        }
                        created
                    }
                }
            };
            if self.alive[t] {
                bad_queue.push(t);
            }
            seg_queue.extend(&created);
            bad_queue.extend(&created);
        }
        Ok(())
    }

    fn find_live_edge(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        (0..self.tri.len())
            .rev()
            .filter(|&t| self.alive[t])
            .find_map(|t| (0..3).find(|&k| self.edge(t, k) == (a, b)).map(|k| (t, k)))
    }

    fn into_mesh(self) -> Result<TriMesh<T>> {
        let mut triangles = Vec::new();
        let mut boundary_edges = Vec::new();
        for t in (0..self.tri.len()).filter(|&t| self.alive[t]) {
            let tri = self.tri[t];
            // rotate so the longest edge is opposite local vertex 0
            let len = |k: usize| {
                let (a, b) = self.edge(t, k);
                self.p(a).dist(self.p(b))
            };
            let k = (0..3)
                .max_by(|&i, &j| len(i).partial_cmp(&len(j)).unwrap_or(std::cmp::Ordering::Equal).then(j.cmp(&i)))
                .unwrap_or(0);
            triangles.push([tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]]);
            for k in 0..3 {
                if let Some(arc) = self.side[t][k].seg {
                    let (a, b) = self.edge(t, k);
                    boundary_edges.push(BoundaryEdge { v: [a, b], arc });
                }
            }
        }
        TriMesh::from_parts(self.pts, triangles, boundary_edges)
    }
}

/// Ear clipping of a simple counter-clockwise polygon.
fn ear_clip<T: Scalar>(pts: &[Point<T>]) -> Result<Vec<[usize; 3]>> {
    let mut ring: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    let mut i = 0;
    let mut misses = 0;
    while ring.len() > 3 {
        let n = ring.len();
        let (ip, ic, inx) = ((i + n - 1) % n, i % n, (i + 1) % n);
        let (a, b, c) = (pts[ring[ip]], pts[ring[ic]], pts[ring[inx]]);
        let convex = orient(a, b, c) > T::zero();
        let is_ear = convex
            && ring.iter().enumerate().all(|(j, &v)| {
                if j == ip || j == ic || j == inx {
                    return true;
                }
                let p = pts[v];
                if p == a || p == b || p == c {
                    return true;
                }
                !(orient(a, b, p) >= T::zero() && orient(b, c, p) >= T::zero() && orient(c, a, p) >= T::zero())
            });
        if is_ear {
            out.push([ring[ip], ring[ic], ring[inx]]);
            ring.remove(ic);
            i = if ic == 0 { 0 } else { ic - 1 };
            misses = 0;
        } else {
            i = (i + 1) % n;
            misses += 1;
            if misses > n {
                return Err(Error::Mesh("ear clipping found no ear; polygon is degenerate".into()));
            }
        }
    }
    if orient(pts[ring[0]], pts[ring[1]], pts[ring[2]]) <= T::zero() {
        return Err(Error::Mesh("ear clipping left a degenerate triangle".into()));
    }
    out.push([ring[0], ring[1], ring[2]]);
    Ok(out)
}
