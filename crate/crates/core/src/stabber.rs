//! The per-anchor frontier `S[p]`: for every anchor `p` of the cover at the
//! last restart vertex, the set of points `x` of the current cover such that
//! `px` stabs every cover since the restart, in order.
//!
//! Cells live in one flat vertex buffer indexed by `(start, len)` spans and
//! are rebuilt into a second buffer on every advance, so a warmed-up frontier
//! does not allocate.

use crate::cover::CoverTemplate;
use crate::error::{Error, Result};
use crate::geom::{
    abs_tol, clip_into, max_magnitude, shadow_planes, ClipOutcome, ConvexPolygon, HalfPlane, Point,
    ShadowKind,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Span {
    start: u32,
    len: u32,
}

#[derive(Clone, Debug, Default)]
struct Scratch {
    verts: Vec<Point>,
    spans: Vec<Span>,
    a: Vec<Point>,
    b: Vec<Point>,
    tmp: Vec<Point>,
    inner: Vec<HalfPlane>,
}

#[derive(Clone, Debug)]
pub struct Frontier {
    anchors: Vec<Point>,
    spans: Vec<Span>,
    verts: Vec<Point>,
    nonempty: usize,
    tol: f64,
    scratch: Scratch,
}

impl Frontier {
    /// Every cell starts as its own anchor.
    pub fn init(anchors: Vec<Point>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Empty("frontier needs at least one anchor"));
        }
        if anchors.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let tol = abs_tol(max_magnitude(&anchors));
        let mut f = Frontier {
            anchors,
            spans: Vec::new(),
            verts: Vec::new(),
            nonempty: 0,
            tol,
            scratch: Scratch::default(),
        };
        f.reset_cells();
        Ok(f)
    }

    /// Reinitializes in place at the cover of `x`, reusing buffers.
    pub fn restart(&mut self, tmpl: &CoverTemplate, x: Point) {
        tmpl.anchors_into(x, &mut self.anchors);
        self.tol = abs_tol(max_magnitude(&self.anchors));
        self.reset_cells();
    }

    pub(crate) fn from_template(tmpl: &CoverTemplate, x: Point) -> Self {
        let mut anchors = Vec::with_capacity(tmpl.anchor_count());
        tmpl.anchors_into(x, &mut anchors);
        Frontier::init(anchors).expect("templates always contain their center")
    }

    fn reset_cells(&mut self) {
        self.verts.clear();
        self.verts.extend_from_slice(&self.anchors);
        self.spans.clear();
        self.spans.extend((0..self.anchors.len()).map(|i| Span { start: i as u32, len: 1 }));
        self.nonempty = self.anchors.len();
    }

    /// `S'[p] = hull ∩ F(S[p], p)` for every anchor. Returns whether every cell
    /// is now empty.
    pub fn advance(&mut self, hull: &ConvexPolygon) -> bool {
        self.advance_slice(hull.vertices())
    }

    pub(crate) fn advance_slice(&mut self, hull: &[Point]) -> bool {
        let Scratch { verts: nv, spans: ns, a, b, tmp, inner } = &mut self.scratch;
        nv.clear();
        ns.clear();
        let tol = self.tol;
        // Every candidate cell lies in the hull, hence in this disk: halfplanes
        // containing the disk are skipped and ones missing it kill the cell.
        let (center, radius) = bounding_disk(hull);
        let mut nonempty = 0;
        for (k, &p) in self.anchors.iter().enumerate() {
            let span = self.spans[k];
            if span.len == 0 {
                ns.push(span);
                continue;
            }
            let cell = &self.verts[span.start as usize..(span.start + span.len) as usize];
            let start = nv.len() as u32;
            match shadow_planes(cell, p, tol, inner) {
                ShadowKind::Empty => {}
                ShadowKind::All => nv.extend_from_slice(hull),
                ShadowKind::Cone(pivots) => {
                    // `cur_is_hull` avoids copying the hull until a plane cuts it.
                    let mut cur_is_hull = true;
                    let mut dead = false;
                    for h in pivots.iter().chain(inner.iter()) {
                        let dc = h.signed_distance(center);
                        if dc + radius <= tol {
                            continue;
                        }
                        if dc - radius > tol {
                            dead = true;
                            break;
                        }
                        let src: &[Point] = if cur_is_hull { hull } else { a };
                        match clip_into(src, h, tol, tmp, b) {
                            ClipOutcome::Unchanged => {}
                            ClipOutcome::Clipped => {
                                std::mem::swap(a, b);
                                cur_is_hull = false;
                                if a.is_empty() {
                                    dead = true;
                                    break;
                                }
                            }
                        }
                    }
                    if !dead {
                        nv.extend_from_slice(if cur_is_hull { hull } else { a });
                    }
                }
            }
            let len = nv.len() as u32 - start;
            if len > 0 {
                nonempty += 1;
            }
            ns.push(Span { start: if len > 0 { start } else { 0 }, len });
        }
        std::mem::swap(&mut self.verts, nv);
        std::mem::swap(&mut self.spans, ns);
        self.nonempty = nonempty;
        nonempty == 0
    }

    /// First anchor with a nonempty cell, and the cell vertex farthest from it
    /// (ties to the smallest index).
    pub fn witness(&self) -> Result<(Point, Point)> {
        let k = self.spans.iter().position(|s| s.len > 0).ok_or(Error::AllEmpty)?;
        let p = self.anchors[k];
        let cell = self.cell(k);
        let mut q = cell[0];
        let mut best = p.dist(q);
        for &v in &cell[1..] {
            let d = p.dist(v);
            if d > best {
                best = d;
                q = v;
            }
        }
        Ok((p, q))
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    /// Vertices of `S[anchors()[k]]` (empty slice for a tombstoned cell).
    pub fn cell(&self, k: usize) -> &[Point] {
        let s = self.spans[k];
        &self.verts[s.start as usize..(s.start + s.len) as usize]
    }

    pub fn cell_polygon(&self, k: usize) -> ConvexPolygon {
        ConvexPolygon::from_ccw_unchecked(self.cell(k).to_vec())
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn nonempty_count(&self) -> usize {
        self.nonempty
    }

    pub fn all_empty(&self) -> bool {
        self.nonempty == 0
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `Σ_p |S[p]|`.
    pub fn total_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn max_cell_vertices(&self) -> usize {
        self.spans.iter().map(|s| s.len as usize).max().unwrap_or(0)
    }

    /// Bytes of live state (anchors, spans, cell vertices), from lengths
    /// rather than capacities so the figure is allocator-independent.
    pub fn state_bytes(&self) -> usize {
        self.anchors.len() * std::mem::size_of::<Point>()
            + self.spans.len() * std::mem::size_of::<Span>()
            + self.verts.len() * std::mem::size_of::<Point>()
    }
}

/// Vertex centroid and the largest distance from it, slightly inflated so
/// rounding in the distance never excludes a vertex.
fn bounding_disk(v: &[Point]) -> (Point, f64) {
    if v.is_empty() {
        return (Point::new(0.0, 0.0), 0.0);
    }
    let inv = 1.0 / v.len() as f64;
    let c = v.iter().fold(Point::new(0.0, 0.0), |s, &q| s + q * inv);
    let r = v.iter().map(|&q| q.dist(c)).fold(0.0, f64::max);
    (c, r * (1.0 + 1e-12) + f64::EPSILON * c.magnitude())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{cover_at, make_template};

    #[test]
    fn init_and_witness() {
        let f = Frontier::init(vec![Point::new(0.0, 0.0)]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.cell(0), &[Point::new(0.0, 0.0)]);
        assert_eq!(f.witness().unwrap(), (Point::new(0.0, 0.0), Point::new(0.0, 0.0)));
        let many: Vec<Point> = (0..37).map(|i| Point::new(i as f64, 0.0)).collect();
        assert_eq!(Frontier::init(many).unwrap().nonempty_count(), 37);
        assert!(Frontier::init(Vec::new()).is_err());
    }

    #[test]
    fn first_advance_yields_hull() {
        let t = make_template(0.5, 1.0).unwrap();
        let (p, _) = cover_at(&t, Point::new(0.0, 0.0));
        let mut f = Frontier::init(p).unwrap();
        let (_, h) = cover_at(&t, Point::new(0.7, 0.2));
        assert!(!f.advance(&h));
        for k in 0..f.len() {
            assert_eq!(f.cell(k), h.vertices());
        }
    }

    #[test]
    fn doubling_back_empties_everything() {
        let t = make_template(0.5, 1.0).unwrap();
        let c = |x: f64| cover_at(&t, Point::new(x, 0.0));
        let (p, _) = c(0.0);
        let mut f = Frontier::init(p).unwrap();
        assert!(!f.advance(&c(10.0).1));
        assert!(f.advance(&c(0.0).1));
        assert!(f.witness().is_err());
    }

    #[test]
    fn witness_is_farthest_vertex() {
        let mut f = Frontier::init(vec![Point::new(-5.0, 0.5)]).unwrap();
        let sq = ConvexPolygon::rect(Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        f.advance(&sq);
        let (p, q) = f.witness().unwrap();
        assert_eq!(p, Point::new(-5.0, 0.5));
        assert_eq!(q, Point::new(1.0, 0.0));
        assert_eq!(f.witness().unwrap(), (p, q));
    }
}
