//! Planar primitives: orientation, distances, convex hulls, convex clipping,
//! tangents from a point, shadow regions and stabbing order.
//!
//! Everything runs in `f64` with a single absolute tolerance per call. The
//! public entry points derive it from the magnitude of their operands
//! (`rel_tol() * scale`); the `*_tol` variants take it explicitly so that a
//! caller holding a whole stream (the frontier) can fix it once.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when `SIMPLIFY_GEOM_TOL` is unset.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Relative geometric tolerance, read once from `SIMPLIFY_GEOM_TOL`.
pub fn rel_tol() -> f64 {
    static TOL: OnceLock<f64> = OnceLock::new();
    *TOL.get_or_init(|| {
        std::env::var("SIMPLIFY_GEOM_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|t| t.is_finite() && *t >= 0.0)
            .unwrap_or(DEFAULT_REL_TOL)
    })
}

/// Absolute tolerance for inputs of magnitude `scale`.
pub fn abs_tol(scale: f64) -> f64 {
    rel_tol() * scale.abs().max(1e-300)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Plain `sqrt(x² + y²)`: coordinates are far from the overflow range
    /// and `hypot` costs several times more in the clipping loops.
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Largest absolute coordinate.
    pub fn magnitude(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }

    /// Counterclockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// An ordered vertex sequence.
pub type Curve = Vec<Point>;

pub(crate) fn max_magnitude(pts: &[Point]) -> f64 {
    pts.iter().fold(0.0, |m, p| m.max(p.magnitude()))
}

/// Sign of twice the signed area of `abc`: +1 for a left turn, −1 for a right
/// turn, 0 when `c` is within tolerance of the line through `a` and `b`.
pub fn orient(a: Point, b: Point, c: Point) -> i32 {
    let scale = a.magnitude().max(b.magnitude()).max(c.magnitude());
    orient_tol(a, b, c, abs_tol(scale))
}

/// [`orient`] with an explicit distance tolerance.
pub fn orient_tol(a: Point, b: Point, c: Point, tol: f64) -> i32 {
    let u = b - a;
    let v = c - a;
    let cr = u.cross(v);
    let len = u.norm().max(v.norm());
    if cr.abs() <= tol * len {
        0
    } else if cr > 0.0 {
        1
    } else {
        -1
    }
}

/// Euclidean distance from `p` to the closed segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// The closed halfplane `{z : normal·z <= offset}` with a unit normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub normal: Point,
    pub offset: f64,
}

impl HalfPlane {
    /// Builds `{z : normal·z <= offset}`; the pair is rescaled to a unit normal.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(Error::Domain("halfplane normal must be nonzero and finite".into()));
        }
        Ok(HalfPlane { normal: normal * (1.0 / n), offset: offset / n })
    }

    /// Points on or to the left of the directed line `a → b`.
    /// `a` and `b` must differ.
    pub fn left_of(a: Point, b: Point) -> Self {
        let d = b - a;
        let n = Point::new(d.y, -d.x);
        let l = n.norm();
        let n = n * (1.0 / l);
        HalfPlane { normal: n, offset: n.dot(a) }
    }

    /// Points `z` with `(z − s)·dir >= 0`. `dir` must be nonzero.
    pub fn beyond(s: Point, dir: Point) -> Self {
        let n = -dir * (1.0 / dir.norm());
        HalfPlane { normal: n, offset: n.dot(s) }
    }

    /// Signed distance; positive outside.
    pub fn signed_distance(&self, z: Point) -> f64 {
        self.normal.dot(z) - self.offset
    }

    pub fn contains_tol(&self, z: Point, tol: f64) -> bool {
        self.signed_distance(z) <= tol
    }
}

/// Counterclockwise convex polygon. Empty, single-point and two-point
/// (segment) polygons are allowed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexPolygon {
    verts: Vec<Point>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon { verts: Vec::new() }
    }

    pub fn point(p: Point) -> Self {
        ConvexPolygon { verts: vec![p] }
    }

    /// Wraps vertices already in canonical counterclockwise order.
    pub fn from_ccw_unchecked(verts: Vec<Point>) -> Self {
        ConvexPolygon { verts }
    }

    /// Axis-aligned rectangle.
    pub fn rect(lo: Point, hi: Point) -> Self {
        ConvexPolygon {
            verts: vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)],
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn translate(&self, d: Point) -> Self {
        ConvexPolygon { verts: self.verts.iter().map(|&v| v + d).collect() }
    }

    pub fn scale_hint(&self) -> f64 {
        max_magnitude(&self.verts)
    }

    pub fn contains(&self, z: Point) -> bool {
        self.contains_tol(z, abs_tol(self.scale_hint().max(z.magnitude())))
    }

    pub fn contains_tol(&self, z: Point, tol: f64) -> bool {
        contains_slice(&self.verts, z, tol)
    }

    /// Distance from `z` to the boundary (for point and segment polygons, to
    /// the set itself).
    pub fn boundary_distance(&self, z: Point) -> f64 {
        let v = &self.verts;
        match v.len() {
            0 => f64::INFINITY,
            1 => z.dist(v[0]),
            n => (0..n)
                .map(|i| point_segment_distance(z, v[i], v[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Edge halfplanes (counterclockwise order). Only meaningful for three or
    /// more vertices.
    pub fn edge_halfplanes(&self) -> impl Iterator<Item = HalfPlane> + '_ {
        let n = self.verts.len();
        (0..n).map(move |i| HalfPlane::left_of(self.verts[i], self.verts[(i + 1) % n]))
    }

    /// Whether the vertex list is in canonical form under `tol`.
    pub fn is_canonical(&self, tol: f64) -> bool {
        let v = &self.verts;
        let n = v.len();
        if n <= 1 {
            return true;
        }
        if n == 2 {
            return v[0].dist(v[1]) > tol;
        }
        (0..n).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let c = v[(i + 2) % n];
            a.dist(b) > tol && orient_tol(a, b, c, tol) > 0
        })
    }
}

fn contains_slice(v: &[Point], z: Point, tol: f64) -> bool {
    match v.len() {
        0 => false,
        1 => z.dist(v[0]) <= tol,
        2 => point_segment_distance(z, v[0], v[1]) <= tol,
        n => {
            let mut prev = v[n - 1];
            for &cur in v {
                let d = cur - prev;
                let cr = d.cross(z - prev);
                // Squared form avoids a square root; a negative `tol`
                // (strict interior) needs the plain comparison.
                let out = if tol >= 0.0 {
                    cr < 0.0 && cr * cr > tol * tol * d.norm2()
                } else {
                    cr < -tol * d.norm()
                };
                if out {
                    return false;
                }
                prev = cur;
            }
            true
        }
    }
}

/// Squared distance from `p` to the closed segment `ab`.
#[inline]
fn point_segment_distance2(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return (p - a).norm2();
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    (p - a.lerp(b, t)).norm2()
}

/// True when `b` lies within `tol` of the segment `ac`.
#[inline]
fn redundant(a: Point, b: Point, c: Point, tol: f64) -> bool {
    // Far from the line through `ac` implies far from the segment.
    let d = c - a;
    let cr = d.cross(b - a);
    if cr * cr > tol * tol * d.norm2() {
        return false;
    }
    point_segment_distance2(b, a, c) <= tol * tol
}

#[inline]
fn near(a: Point, b: Point, tol: f64) -> bool {
    (a - b).norm2() <= tol * tol
}

fn push_canonical(out: &mut Vec<Point>, q: Point, tol: f64) {
    if let Some(&last) = out.last() {
        if near(last, q, tol) {
            return;
        }
    }
    while out.len() >= 2 && redundant(out[out.len() - 2], out[out.len() - 1], q, tol) {
        out.pop();
    }
    if let Some(&last) = out.last() {
        if near(last, q, tol) {
            return;
        }
    }
    out.push(q);
}

/// Drops near-duplicate and near-collinear vertices of a nominally convex
/// cyclic sequence, in linear time.
pub(crate) fn canonicalize_into(src: &[Point], out: &mut Vec<Point>, tol: f64) {
    out.clear();
    for &q in src {
        push_canonical(out, q, tol);
    }
    loop {
        let n = out.len();
        if n >= 2 && near(out[n - 1], out[0], tol) {
            out.pop();
            continue;
        }
        if n >= 3 && redundant(out[n - 2], out[n - 1], out[0], tol) {
            out.pop();
            continue;
        }
        if n >= 3 && redundant(out[n - 1], out[0], out[1], tol) {
            out.remove(0);
            continue;
        }
        break;
    }
}

/// Convex hull in canonical counterclockwise form. Collinear inputs give a
/// segment, a single distinct input gives a point.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon> {
    if points.is_empty() {
        return Err(Error::Empty("convex_hull needs at least one point"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let tol = abs_tol(max_magnitude(points));
    Ok(convex_hull_tol(points, tol))
}

pub(crate) fn convex_hull_tol(points: &[Point], tol: f64) -> ConvexPolygon {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() == 1 {
        return ConvexPolygon::point(pts[0]);
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut out = Vec::with_capacity(hull.len());
    canonicalize_into(&hull, &mut out, tol);
    ConvexPolygon { verts: out }
}

/// Result of clipping a vertex list against one halfplane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ClipOutcome {
    /// Every vertex was already inside; the output buffer was not written.
    Unchanged,
    /// The output buffer holds the clipped, canonical polygon (possibly empty).
    Clipped,
}

/// Sutherland–Hodgman step for one halfplane. Points within `tol` outside
/// the boundary count as inside, so thin results survive as segments or
/// points instead of disappearing.
pub(crate) fn clip_into(
    src: &[Point],
    h: &HalfPlane,
    tol: f64,
    tmp: &mut Vec<Point>,
    out: &mut Vec<Point>,
) -> ClipOutcome {
    let n = src.len();
    if n == 0 {
        return ClipOutcome::Unchanged;
    }
    let mut dmax = f64::NEG_INFINITY;
    let mut dmin = f64::INFINITY;
    for &v in src {
        let d = h.signed_distance(v);
        dmax = dmax.max(d);
        dmin = dmin.min(d);
    }
    if dmax <= tol {
        return ClipOutcome::Unchanged;
    }
    out.clear();
    if dmin > tol {
        return ClipOutcome::Clipped;
    }
    tmp.clear();
    let mut a = src[n - 1];
    let mut da = h.signed_distance(a);
    for &b in src {
        let db = h.signed_distance(b);
        let ain = da <= tol;
        let bin = db <= tol;
        if ain && !bin && da < 0.0 {
            tmp.push(a.lerp(b, da / (da - db)));
        } else if !ain && bin && db < 0.0 {
            tmp.push(a.lerp(b, da / (da - db)));
        }
        if bin {
            tmp.push(b);
        }
        a = b;
        da = db;
    }
    canonicalize_into(tmp, out, tol);
    ClipOutcome::Clipped
}

/// `poly ∩ h`, canonical; may be empty.
pub fn clip(poly: &ConvexPolygon, h: &HalfPlane) -> ConvexPolygon {
    let scale = poly.scale_hint().max(h.offset.abs());
    clip_tol(poly, h, abs_tol(scale))
}

pub fn clip_tol(poly: &ConvexPolygon, h: &HalfPlane, tol: f64) -> ConvexPolygon {
    let mut tmp = Vec::new();
    let mut out = Vec::new();
    match clip_into(&poly.verts, h, tol, &mut tmp, &mut out) {
        ClipOutcome::Unchanged => poly.clone(),
        ClipOutcome::Clipped => ConvexPolygon { verts: out },
    }
}

/// `P ∩ Q`, canonical; may be empty. Linear in `|P| + |Q|` (slab sweep over
/// the merged x-coordinates of both boundaries).
pub fn intersect_convex(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    let scale = p.scale_hint().max(q.scale_hint());
    intersect_convex_tol(p, q, abs_tol(scale))
}

pub fn intersect_convex_tol(p: &ConvexPolygon, q: &ConvexPolygon, tol: f64) -> ConvexPolygon {
    if p.is_empty() || q.is_empty() {
        return ConvexPolygon::empty();
    }
    // Degenerate operands: clip the small one by the other's halfplanes.
    if p.len() < 3 || q.len() < 3 || is_thin(p, tol) || is_thin(q, tol) {
        let (small, big) = if p.len() <= q.len() { (p, q) } else { (q, p) };
        return clip_degenerate(small, big, tol);
    }
    let cp = Chains::new(&p.verts);
    let cq = Chains::new(&q.verts);
    let xa = cp.xmin.max(cq.xmin);
    let xb = cp.xmax.min(cq.xmax);
    if xa > xb + tol {
        return ConvexPolygon::empty();
    }
    if xb - xa <= tol {
        // Overlap is a vertical sliver: fall back to clipping.
        return clip_degenerate(p, q, tol);
    }
    let mut xs: Vec<f64> = Vec::with_capacity(p.len() + q.len() + 2);
    merge_xs(&cp, &cq, xa, xb, &mut xs);

    let mut lower: Vec<Point> = Vec::new();
    let mut upper: Vec<Point> = Vec::new();
    let mut walkers = [cp.walker(), cq.walker()];
    for w in 0..xs.len() - 1 {
        let (x0, x1) = (xs[w], xs[w + 1]);
        if x1 - x0 <= 0.0 {
            continue;
        }
        let xm = 0.5 * (x0 + x1);
        let lp = walkers[0].lower_line(&cp, xm);
        let up = walkers[0].upper_line(&cp, xm);
        let lq = walkers[1].lower_line(&cq, xm);
        let uq = walkers[1].upper_line(&cq, xm);
        let mut cuts = [x0, x1, x1, x1];
        let mut nc = 2;
        for (f, g) in [(lp, lq), (up, uq)] {
            if let Some(xc) = crossing(f, g, x0, x1) {
                cuts[nc] = xc;
                nc += 1;
            }
        }
        let cuts = &mut cuts[..nc];
        cuts.sort_by(f64::total_cmp);
        let lo_at = |x: f64| eval(lp, x).max(eval(lq, x));
        let hi_at = |x: f64| eval(up, x).min(eval(uq, x));
        for s in 0..nc - 1 {
            let (s0, s1) = (cuts[s], cuts[s + 1]);
            let g0 = hi_at(s0) - lo_at(s0);
            let g1 = hi_at(s1) - lo_at(s1);
            if g0 >= -tol {
                lower.push(Point::new(s0, lo_at(s0)));
                upper.push(Point::new(s0, hi_at(s0)));
            }
            if (g0 >= -tol) != (g1 >= -tol) && s1 > s0 {
                let xc = s0 + (s1 - s0) * (g0 / (g0 - g1)).clamp(0.0, 1.0);
                let y = 0.5 * (lo_at(xc) + hi_at(xc));
                lower.push(Point::new(xc, y));
                upper.push(Point::new(xc, y));
            }
        }
        if w + 2 == xs.len() {
            let g = hi_at(x1) - lo_at(x1);
            if g >= -tol {
                lower.push(Point::new(x1, lo_at(x1)));
                upper.push(Point::new(x1, hi_at(x1)));
            }
        }
    }
    let mut ring = lower;
    ring.extend(upper.into_iter().rev());
    let mut out = Vec::with_capacity(ring.len());
    canonicalize_into(&ring, &mut out, tol);
    ConvexPolygon { verts: out }
}

fn is_thin(p: &ConvexPolygon, tol: f64) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &p.verts {
        lo = lo.min(v.x);
        hi = hi.max(v.x);
    }
    hi - lo <= tol
}

fn clip_degenerate(small: &ConvexPolygon, big: &ConvexPolygon, tol: f64) -> ConvexPolygon {
    if big.len() < 3 {
        // Both degenerate: intersect via halfplane envelopes of `big`.
        let planes = degenerate_halfplanes(&big.verts);
        return clip_many(small, &planes, tol);
    }
    let planes: Vec<HalfPlane> = big.edge_halfplanes().collect();
    clip_many(small, &planes, tol)
}

fn clip_many(poly: &ConvexPolygon, planes: &[HalfPlane], tol: f64) -> ConvexPolygon {
    let mut cur = poly.verts.clone();
    let mut tmp = Vec::new();
    let mut out = Vec::new();
    for h in planes {
        if cur.is_empty() {
            break;
        }
        if clip_into(&cur, h, tol, &mut tmp, &mut out) == ClipOutcome::Clipped {
            std::mem::swap(&mut cur, &mut out);
        }
    }
    ConvexPolygon { verts: cur }
}

/// Four halfplanes whose intersection is the point or segment `v`.
fn degenerate_halfplanes(v: &[Point]) -> Vec<HalfPlane> {
    let (a, b) = if v.len() == 1 { (v[0], v[0]) } else { (v[0], v[1]) };
    let d = if a == b { Point::new(1.0, 0.0) } else { b - a };
    let e = d.perp();
    vec![
        HalfPlane::beyond(a, d),
        HalfPlane::beyond(b, -d),
        HalfPlane::beyond(a, e),
        HalfPlane::beyond(a, -e),
    ]
}

/// Lower and upper monotone chains of a convex polygon, each from left to
/// right.
struct Chains {
    lower: Vec<Point>,
    upper: Vec<Point>,
    xmin: f64,
    xmax: f64,
}

impl Chains {
    fn new(v: &[Point]) -> Self {
        let n = v.len();
        let key = |p: &Point| (p.x, p.y);
        let lt = |a: &Point, b: &Point| key(a).partial_cmp(&key(b)) == Some(std::cmp::Ordering::Less);
        // Bottom-left and bottom-right / top-left and top-right extremes.
        let mut bl = 0;
        let mut tr = 0;
        for i in 1..n {
            if lt(&v[i], &v[bl]) {
                bl = i;
            }
            if lt(&v[tr], &v[i]) {
                tr = i;
            }
        }
        let mut lower = vec![v[bl]];
        let mut i = bl;
        loop {
            let j = (i + 1) % n;
            if !(v[j].x > v[i].x) {
                break;
            }
            lower.push(v[j]);
            i = j;
        }
        let mut upper = vec![v[tr]];
        let mut i = tr;
        loop {
            let j = (i + 1) % n;
            if !(v[j].x < v[i].x) {
                break;
            }
            upper.push(v[j]);
            i = j;
        }
        upper.reverse();
        let xmin = v[bl].x;
        let xmax = v[tr].x;
        Chains { lower, upper, xmin, xmax }
    }

    fn walker(&self) -> Walker {
        Walker { lo: 0, up: 0 }
    }
}

struct Walker {
    lo: usize,
    up: usize,
}

type Line = (Point, Point);

impl Walker {
    fn lower_line(&mut self, c: &Chains, x: f64) -> Line {
        while self.lo + 2 < c.lower.len() && c.lower[self.lo + 1].x <= x {
            self.lo += 1;
        }
        seg_or_flat(&c.lower, self.lo)
    }

    fn upper_line(&mut self, c: &Chains, x: f64) -> Line {
        while self.up + 2 < c.upper.len() && c.upper[self.up + 1].x <= x {
            self.up += 1;
        }
        seg_or_flat(&c.upper, self.up)
    }
}

fn seg_or_flat(chain: &[Point], i: usize) -> Line {
    if chain.len() == 1 {
        (chain[0], chain[0])
    } else {
        (chain[i], chain[i + 1])
    }
}

fn eval((a, b): Line, x: f64) -> f64 {
    let dx = b.x - a.x;
    if dx == 0.0 {
        return a.y.max(b.y);
    }
    a.y + (b.y - a.y) * ((x - a.x) / dx)
}

fn crossing(f: Line, g: Line, x0: f64, x1: f64) -> Option<f64> {
    let d0 = eval(f, x0) - eval(g, x0);
    let d1 = eval(f, x1) - eval(g, x1);
    if (d0 > 0.0 && d1 < 0.0) || (d0 < 0.0 && d1 > 0.0) {
        Some(x0 + (x1 - x0) * (d0 / (d0 - d1)))
    } else {
        None
    }
}

fn merge_xs(a: &Chains, b: &Chains, xa: f64, xb: f64, out: &mut Vec<f64>) {
    out.push(xa);
    let lists = [&a.lower, &a.upper, &b.lower, &b.upper];
    let mut idx = [0usize; 4];
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (k, l) in lists.iter().enumerate() {
            if let Some(p) = l.get(idx[k]) {
                if best.map_or(true, |(_, x)| p.x < x) {
                    best = Some((k, p.x));
                }
            }
        }
        let Some((k, x)) = best else { break };
        idx[k] += 1;
        if x > xa && x < xb && x > *out.last().unwrap() {
            out.push(x);
        }
    }
    if xb > *out.last().unwrap() {
        out.push(xb);
    }
}

/// Indices `(left, right)` of the vertices where the two lines through `p`
/// support `poly`: all of `poly` lies right of `p → left` and left of
/// `p → right`. Binary search, `O(log n)`.
pub fn tangent_points(p: Point, poly: &ConvexPolygon) -> Result<(usize, usize)> {
    let tol = abs_tol(poly.scale_hint().max(p.magnitude()));
    tangent_points_tol(p, poly, tol)
}

pub fn tangent_points_tol(p: Point, poly: &ConvexPolygon, tol: f64) -> Result<(usize, usize)> {
    let v = &poly.verts;
    match v.len() {
        0 => Err(Error::Empty("tangent_points needs a nonempty polygon")),
        _ if contains_slice(v, p, tol) => Err(Error::PointInside),
        1 => Ok((0, 0)),
        2 => {
            let o = (v[0] - p).cross(v[1] - p);
            if o > 0.0 {
                Ok((1, 0))
            } else if o < 0.0 {
                Ok((0, 1))
            } else {
                let near = if p.dist(v[0]) <= p.dist(v[1]) { 0 } else { 1 };
                Ok((near, near))
            }
        }
        _ => Ok((extreme_angle(v, p, 1), extreme_angle(v, p, -1))),
    }
}

/// Linear-scan reference for [`tangent_points`] (same tie rule).
pub fn tangent_points_linear(p: Point, poly: &ConvexPolygon) -> Result<(usize, usize)> {
    let v = &poly.verts;
    if v.len() < 3 {
        return tangent_points(p, poly);
    }
    let tol = abs_tol(poly.scale_hint().max(p.magnitude()));
    if contains_slice(v, p, tol) {
        return Err(Error::PointInside);
    }
    let find = |sense: i32| -> usize {
        (0..v.len())
            .find(|&i| is_extreme(v, p, sense, i))
            .unwrap_or_else(|| argmax_angle(v, p, sense))
    };
    Ok((find(1), find(-1)))
}

/// `sign(angle(j) - angle(i))` around `p`, flipped when `sense = -1`.
#[inline]
fn angle_cmp(v: &[Point], p: Point, sense: i32, i: usize, j: usize) -> i32 {
    let n = v.len();
    let a = v[i % n] - p;
    let b = v[j % n] - p;
    let c = a.cross(b);
    let s = if c > 0.0 {
        1
    } else if c < 0.0 {
        -1
    } else {
        0
    };
    s * sense
}

#[inline]
fn is_extreme(v: &[Point], p: Point, sense: i32, i: usize) -> bool {
    let n = v.len();
    angle_cmp(v, p, sense, i + 1, i) >= 0 && angle_cmp(v, p, sense, i, i + n - 1) < 0
}

fn argmax_angle(v: &[Point], p: Point, sense: i32) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if angle_cmp(v, p, sense, best, i) > 0 {
            best = i;
        }
    }
    best
}

/// Vertex of extreme angle as seen from `p` (`sense = 1`: most
/// counterclockwise, `-1`: most clockwise); first of a tied pair in
/// counterclockwise order.
fn extreme_angle(v: &[Point], p: Point, sense: i32) -> usize {
    let n = v.len();
    let cmp = |i: usize, j: usize| angle_cmp(v, p, sense, i, j);
    let extr = |i: usize| cmp(i + 1, i) >= 0 && cmp(i, i + n - 1) < 0;
    if extr(0) {
        return 0;
    }
    let (mut lo, mut hi) = (0usize, n);
    while lo + 1 < hi {
        let m = (lo + hi) / 2;
        if extr(m) {
            return m;
        }
        let ls = cmp(lo + 1, lo);
        let ms = cmp(m + 1, m);
        if ls < ms || (ls == ms && ls == cmp(lo, m)) {
            hi = m;
        } else {
            lo = m;
        }
    }
    if extr(lo) {
        lo
    } else {
        // Rounding made the comparisons inconsistent; fall back to a scan.
        (0..n).find(|&i| extr(i)).unwrap_or_else(|| argmax_angle(v, p, sense))
    }
}

/// `F(S, p) = {y : segment py meets S}`.
#[derive(Clone, Debug, PartialEq)]
pub enum ShadowRegion {
    /// `p ∈ S`: every segment from `p` meets `S`.
    All,
    /// `S = ∅`.
    Empty,
    /// Wedge at `apex` bounded by two pivot halfplanes through the apex, cut
    /// by the supporting halfplanes of the edges of `S` that face the apex.
    Cone { apex: Point, pivots: [HalfPlane; 2], inner: Vec<HalfPlane> },
}

impl ShadowRegion {
    pub fn contains_tol(&self, y: Point, tol: f64) -> bool {
        match self {
            ShadowRegion::All => true,
            ShadowRegion::Empty => false,
            ShadowRegion::Cone { pivots, inner, .. } => {
                pivots.iter().chain(inner.iter()).all(|h| h.contains_tol(y, tol))
            }
        }
    }

    pub fn contains(&self, y: Point) -> bool {
        let scale = match self {
            ShadowRegion::Cone { apex, .. } => apex.magnitude().max(y.magnitude()),
            _ => y.magnitude(),
        };
        self.contains_tol(y, abs_tol(scale))
    }

    /// All halfplanes of a cone (pivots first); empty otherwise.
    pub fn halfplanes(&self) -> Vec<HalfPlane> {
        match self {
            ShadowRegion::Cone { pivots, inner, .. } => {
                pivots.iter().chain(inner.iter()).copied().collect()
            }
            _ => Vec::new(),
        }
    }
}

/// The shadow `F(S, p)`.
pub fn shadow_region(s: &ConvexPolygon, p: Point) -> ShadowRegion {
    let tol = abs_tol(s.scale_hint().max(p.magnitude()));
    shadow_region_tol(s, p, tol)
}

pub fn shadow_region_tol(s: &ConvexPolygon, p: Point, tol: f64) -> ShadowRegion {
    let mut inner = Vec::new();
    match shadow_planes(&s.verts, p, tol, &mut inner) {
        ShadowKind::All => ShadowRegion::All,
        ShadowKind::Empty => ShadowRegion::Empty,
        ShadowKind::Cone(pivots) => ShadowRegion::Cone { apex: p, pivots, inner },
    }
}

pub(crate) enum ShadowKind {
    All,
    Empty,
    Cone([HalfPlane; 2]),
}

/// Allocation-free core of [`shadow_region_tol`]: inner halfplanes are
/// written to `inner`.
pub(crate) fn shadow_planes(v: &[Point], p: Point, tol: f64, inner: &mut Vec<HalfPlane>) -> ShadowKind {
    inner.clear();
    let n = v.len();
    if n == 0 {
        return ShadowKind::Empty;
    }
    if contains_slice(v, p, tol) {
        return ShadowKind::All;
    }
    let point_cone = |s: Point, inner: &mut Vec<HalfPlane>| {
        inner.push(HalfPlane::beyond(s, s - p));
        ShadowKind::Cone([HalfPlane::left_of(p, s), HalfPlane::left_of(s, p)])
    };
    if n == 1 {
        return point_cone(v[0], inner);
    }
    if n == 2 {
        if orient_tol(p, v[0], v[1], tol) == 0 {
            let near = if p.dist(v[0]) <= p.dist(v[1]) { v[0] } else { v[1] };
            return point_cone(near, inner);
        }
        let (l, r) = if (v[0] - p).cross(v[1] - p) > 0.0 { (v[1], v[0]) } else { (v[0], v[1]) };
        inner.push(HalfPlane::left_of(l, r));
        return ShadowKind::Cone([HalfPlane::left_of(p, r), HalfPlane::left_of(l, p)]);
    }
    let li = extreme_angle(v, p, 1);
    let ri = extreme_angle(v, p, -1);
    let mut i = li;
    while i != ri {
        let j = if i + 1 == n { 0 } else { i + 1 };
        inner.push(HalfPlane::left_of(v[i], v[j]));
        i = j;
    }
    ShadowKind::Cone([HalfPlane::left_of(p, v[ri]), HalfPlane::left_of(v[li], p)])
}

/// `poly ∩ shadow`.
pub fn clip_by_shadow(poly: &ConvexPolygon, shadow: &ShadowRegion) -> ConvexPolygon {
    let scale = match shadow {
        ShadowRegion::Cone { apex, .. } => poly.scale_hint().max(apex.magnitude()),
        _ => poly.scale_hint(),
    };
    clip_by_shadow_tol(poly, shadow, abs_tol(scale))
}

pub fn clip_by_shadow_tol(poly: &ConvexPolygon, shadow: &ShadowRegion, tol: f64) -> ConvexPolygon {
    match shadow {
        ShadowRegion::All => poly.clone(),
        ShadowRegion::Empty => ConvexPolygon::empty(),
        ShadowRegion::Cone { .. } => clip_many(poly, &shadow.halfplanes(), tol),
    }
}

/// Parameter range `[t_lo, t_hi] ⊆ [0, 1]` of the points of `a + t(b − a)`
/// inside `poly`, or `None`.
pub fn segment_polygon_interval(a: Point, b: Point, poly: &ConvexPolygon) -> Option<(f64, f64)> {
    let scale = poly.scale_hint().max(a.magnitude()).max(b.magnitude());
    segment_polygon_interval_tol(a, b, poly, abs_tol(scale))
}

pub fn segment_polygon_interval_tol(
    a: Point,
    b: Point,
    poly: &ConvexPolygon,
    tol: f64,
) -> Option<(f64, f64)> {
    let planes: Vec<HalfPlane> = match poly.len() {
        0 => return None,
        1 | 2 => degenerate_halfplanes(&poly.verts),
        _ => poly.edge_halfplanes().collect(),
    };
    let d = b - a;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for h in &planes {
        let num = h.offset + tol - h.normal.dot(a);
        let den = h.normal.dot(d);
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else if den > 0.0 {
            hi = hi.min(num / den);
        } else {
            lo = lo.max(num / den);
        }
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

/// Whether `ab` meets `polys` in order: parameters `t_1 <= … <= t_m` exist
/// with `a + t_i(b − a) ∈ polys[i]`. Greedy over the per-polygon intervals.
pub fn stabs_in_order(a: Point, b: Point, polys: &[ConvexPolygon]) -> bool {
    let scale = polys
        .iter()
        .map(ConvexPolygon::scale_hint)
        .fold(a.magnitude().max(b.magnitude()), f64::max);
    stabs_in_order_tol(a, b, polys, abs_tol(scale))
}

pub fn stabs_in_order_tol(a: Point, b: Point, polys: &[ConvexPolygon], tol: f64) -> bool {
    // Parameter slack equivalent to `tol` along the segment.
    let len = a.dist(b);
    let tslack = if len > 0.0 { tol / len } else { 0.0 };
    let mut t = 0.0f64;
    for poly in polys {
        match segment_polygon_interval_tol(a, b, poly, tol) {
            None => return false,
            Some((lo, hi)) => {
                t = t.max(lo);
                if t > hi + tslack {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq() -> ConvexPolygon {
        ConvexPolygon::rect(Point::new(0.0, 0.0), Point::new(1.0, 1.0))
    }

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn same_ring(a: &ConvexPolygon, b: &[Point]) -> bool {
        let v = a.vertices();
        if v.len() != b.len() {
            return false;
        }
        (0..v.len()).any(|s| (0..v.len()).all(|i| v[(i + s) % v.len()].dist(b[i]) < 1e-12))
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)), 1);
        assert_eq!(orient(pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)), 0);
        assert_eq!(orient(pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0)), -1);
    }

    #[test]
    fn point_segment_distance_examples() {
        assert_eq!(point_segment_distance(pt(1.0, 1.0), pt(0.0, 0.0), pt(2.0, 0.0)), 1.0);
        assert_eq!(point_segment_distance(pt(3.0, 0.0), pt(0.0, 0.0), pt(2.0, 0.0)), 1.0);
        assert_eq!(point_segment_distance(pt(0.0, 0.0), pt(0.0, 0.0), pt(1.0, 0.0)), 0.0);
    }

    #[test]
    fn hull_examples() {
        let h = convex_hull(&[pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0), pt(0.5, 0.5)])
            .unwrap();
        assert!(same_ring(&h, sq().vertices()));
        assert_eq!(convex_hull(&[pt(2.0, 3.0)]).unwrap().vertices(), &[pt(2.0, 3.0)]);
        let s = convex_hull(&[pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)]).unwrap();
        assert!(same_ring(&s, &[pt(0.0, 0.0), pt(2.0, 0.0)]));
        assert!(convex_hull(&[]).is_err());
    }

    #[test]
    fn clip_examples() {
        let h = HalfPlane::new(pt(1.0, 0.0), 0.5).unwrap();
        assert!(same_ring(&clip(&sq(), &h), &[pt(0.0, 0.0), pt(0.5, 0.0), pt(0.5, 1.0), pt(0.0, 1.0)]));
        assert!(clip(&sq(), &HalfPlane::new(pt(1.0, 0.0), -1.0).unwrap()).is_empty());
        assert_eq!(clip(&sq(), &HalfPlane::new(pt(1.0, 0.0), 2.0).unwrap()), sq());
    }

    #[test]
    fn clip_keeps_degenerate_witness() {
        // Clipping to the line x = 1 leaves the right edge as a segment.
        let h = HalfPlane::new(pt(-1.0, 0.0), -1.0).unwrap();
        let r = clip(&sq(), &h);
        assert!(same_ring(&r, &[pt(1.0, 0.0), pt(1.0, 1.0)]));
    }

    #[test]
    fn intersect_examples() {
        let shifted = sq().translate(pt(0.5, 0.5));
        let r = intersect_convex(&sq(), &shifted);
        assert!(same_ring(&r, &[pt(0.5, 0.5), pt(1.0, 0.5), pt(1.0, 1.0), pt(0.5, 1.0)]));
        assert!(intersect_convex(&sq(), &sq().translate(pt(3.0, 0.0))).is_empty());
        let big = ConvexPolygon::rect(pt(-1.0, -1.0), pt(2.0, 2.0));
        assert!(same_ring(&intersect_convex(&sq(), &big), sq().vertices()));
    }

    #[test]
    fn tangent_examples() {
        let (l, r) = tangent_points(pt(0.5, -2.0), &sq()).unwrap();
        assert_eq!((sq().vertices()[l], sq().vertices()[r]), (pt(0.0, 0.0), pt(1.0, 0.0)));
        let (l, r) = tangent_points(pt(-2.0, 0.5), &sq()).unwrap();
        assert_eq!((sq().vertices()[l], sq().vertices()[r]), (pt(0.0, 1.0), pt(0.0, 0.0)));
        let single = ConvexPolygon::point(pt(0.0, 0.0));
        assert_eq!(tangent_points(pt(5.0, 5.0), &single).unwrap(), (0, 0));
        assert_eq!(tangent_points(pt(0.5, 0.5), &sq()), Err(Error::PointInside));
    }

    #[test]
    fn shadow_examples() {
        let p = pt(0.3, 0.7);
        assert_eq!(shadow_region(&ConvexPolygon::point(p), p), ShadowRegion::All);
        assert_eq!(shadow_region(&ConvexPolygon::empty(), p), ShadowRegion::Empty);
        let s = shadow_region(&sq(), pt(0.5, -2.0));
        assert!(matches!(s, ShadowRegion::Cone { .. }));
        assert!(s.contains(pt(0.5, 5.0)));
        assert!(!s.contains(pt(0.5, -1.0)));
        assert!(!s.contains(pt(10.0, 0.0)));
    }

    #[test]
    fn clip_by_shadow_examples() {
        let poly = sq().translate(pt(4.0, 4.0));
        assert_eq!(clip_by_shadow(&poly, &ShadowRegion::All), poly);
        assert!(clip_by_shadow(&poly, &ShadowRegion::Empty).is_empty());
        // Apex above the square, target polygon far below the apex but on the
        // apex's side of S.
        let s = shadow_region(&sq(), pt(0.5, 3.0));
        let behind = sq().translate(pt(0.0, 5.0));
        assert!(clip_by_shadow(&behind, &s).is_empty());
    }

    #[test]
    fn interval_examples() {
        let (lo, hi) = segment_polygon_interval(pt(-1.0, 0.5), pt(2.0, 0.5), &sq()).unwrap();
        assert!((lo - 1.0 / 3.0).abs() < 1e-9 && (hi - 2.0 / 3.0).abs() < 1e-9);
        let (lo, hi) = segment_polygon_interval(pt(0.2, 0.2), pt(0.8, 0.7), &sq()).unwrap();
        assert_eq!((lo, hi), (0.0, 1.0));
        assert!(segment_polygon_interval(pt(-1.0, 3.0), pt(2.0, 3.0), &sq()).is_none());
    }

    #[test]
    fn stabbing_examples() {
        let boxes: Vec<_> = [0.0, 2.0, 4.0]
            .iter()
            .map(|&cx| ConvexPolygon::rect(pt(cx - 0.5, -0.5), pt(cx + 0.5, 0.5)))
            .collect();
        let (a, b) = (pt(-1.0, 0.0), pt(5.0, 0.0));
        assert!(stabs_in_order(a, b, &boxes));
        let rev: Vec<_> = boxes.iter().rev().cloned().collect();
        assert!(!stabs_in_order(a, b, &rev));
        let mut miss = boxes.clone();
        miss.push(sq().translate(pt(0.0, 10.0)));
        assert!(!stabs_in_order(a, b, &miss));
    }
}
