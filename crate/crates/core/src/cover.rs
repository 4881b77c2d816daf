//! Grid ball covers: the cells of side `εδ/(2√2)` meeting the disk of radius
//! `(1+ε/2)δ` around a grid vertex, their corner set (the anchors) and the
//! hull of those corners.
//!
//! A template is built once per `(ε, δ)` around the origin; every cover is an
//! exact translate of it.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point};

#[derive(Debug, Clone)]
pub struct CoverTemplate {
    pub eps: f64,
    pub delta: f64,
    pub cell_side: f64,
    /// Distinct cell corners relative to the center, sorted by `(x, y)`.
    pub corner_offsets: Vec<Point>,
    /// Hull of the corners relative to the center, counterclockwise.
    pub hull: ConvexPolygon,
}

impl CoverTemplate {
    pub fn anchor_count(&self) -> usize {
        self.corner_offsets.len()
    }

    /// Anchors of the cover centered at `x`, in template order.
    pub fn anchors_into(&self, x: Point, out: &mut Vec<Point>) {
        out.clear();
        out.extend(self.corner_offsets.iter().map(|&o| x + o));
    }

    /// Hull vertices of the cover centered at `x`.
    pub fn hull_into(&self, x: Point, out: &mut Vec<Point>) {
        out.clear();
        out.extend(self.hull.vertices().iter().map(|&o| x + o));
    }
}

/// Covers accept `ε ∈ (0, 1]`; the simplifiers narrow this to `(0, 1)`.
fn check_params(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

/// Builds the template for `(eps, delta)`.
pub fn make_template(eps: f64, delta: f64) -> Result<CoverTemplate> {
    check_params(eps, delta)?;
    let side = eps * delta / (2.0 * std::f64::consts::SQRT_2);
    let radius = (1.0 + eps / 2.0) * delta;
    let r2 = radius * radius;
    let reach = (radius / side).ceil() as i64 + 1;
    let width = (2 * reach + 2) as usize;
    // Corner (i, j) is stored at [(i + reach) * width + (j + reach)].
    let mut corner = vec![false; width * width];
    // Per column: lowest and highest included corner, for the hull.
    let mut col_lo = vec![i64::MAX; width];
    let mut col_hi = vec![i64::MIN; width];
    let gap = |i: i64| -> f64 {
        let g = if i >= 0 { i } else { -i - 1 };
        g as f64 * side
    };
    for i in -reach..reach {
        let gx = gap(i);
        if gx * gx > r2 {
            continue;
        }
        for j in -reach..reach {
            let gy = gap(j);
            if gx * gx + gy * gy > r2 {
                continue;
            }
            for (ci, cj) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                let col = (ci + reach) as usize;
                corner[col * width + (cj + reach) as usize] = true;
                col_lo[col] = col_lo[col].min(cj);
                col_hi[col] = col_hi[col].max(cj);
            }
        }
    }
    let mut corner_offsets = Vec::new();
    for col in 0..width {
        for row in 0..width {
            if corner[col * width + row] {
                let i = col as i64 - reach;
                let j = row as i64 - reach;
                corner_offsets.push(Point::new(i as f64 * side, j as f64 * side));
            }
        }
    }
    let mut extremes = Vec::new();
    for col in 0..width {
        if col_lo[col] <= col_hi[col] {
            let i = col as i64 - reach;
            extremes.push((i, col_lo[col]));
            if col_hi[col] != col_lo[col] {
                extremes.push((i, col_hi[col]));
            }
        }
    }
    let hull: Vec<Point> = integer_hull(extremes)
        .into_iter()
        .map(|(i, j)| Point::new(i as f64 * side, j as f64 * side))
        .collect();
    Ok(CoverTemplate {
        eps,
        delta,
        cell_side: side,
        corner_offsets,
        hull: ConvexPolygon::from_ccw_unchecked(hull),
    })
}

/// Exact monotone-chain hull on integer points; strictly convex, CCW.
fn integer_hull(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i128 {
        (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = hull.len();
        let seq: Vec<(i64, i64)> =
            if pass == 0 { pts.clone() } else { pts.iter().rev().copied().collect() };
        for p in seq {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Anchors and hull of the cover centered at `x`.
pub fn cover_at(tmpl: &CoverTemplate, x: Point) -> (Vec<Point>, ConvexPolygon) {
    let mut anchors = Vec::with_capacity(tmpl.corner_offsets.len());
    tmpl.anchors_into(x, &mut anchors);
    (anchors, tmpl.hull.translate(x))
}

/// Bound on the number of cached templates; the cache is flushed when it
/// fills up (templates are cheap to rebuild relative to a stream).
const CACHE_CAP: usize = 64;

type Cache = RwLock<HashMap<(u64, u64), Arc<CoverTemplate>>>;

/// Shared template for `(eps, delta)`, keyed by exact bit patterns.
pub fn template(eps: f64, delta: f64) -> Result<Arc<CoverTemplate>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (eps.to_bits(), delta.to_bits());
    if let Some(t) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(Arc::clone(t));
    }
    let t = Arc::new(make_template(eps, delta)?);
    let mut w = cache.write().unwrap_or_else(|e| e.into_inner());
    if w.len() >= CACHE_CAP {
        w.clear();
    }
    Ok(Arc::clone(w.entry(key).or_insert(t)))
}
