//! Fréchet-distance oracles: the free-space decision procedure, distance by
//! bisection, the segment-versus-curve special case, and the minimum
//! vertex-restricted simplification size.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geom::{abs_tol, max_magnitude, Point};

type Interval = Option<(f64, f64)>;

/// `{t ∈ [0, 1] : |a + t(b − a) − p| <= r}`.
fn free_interval(p: Point, a: Point, b: Point, r: f64) -> Interval {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return (a.dist(p) <= r).then_some((0.0, 1.0));
    }
    let l = l2.sqrt();
    let h = d.cross(p - a).abs() / l;
    if h > r {
        return None;
    }
    let tc = (p - a).dot(d) / l2;
    let w = (r * r - h * h).max(0.0).sqrt() / l;
    let lo = (tc - w).max(0.0);
    let hi = (tc + w).min(1.0);
    (lo <= hi).then_some((lo, hi))
}

fn check_curves(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("curves need at least one vertex"));
    }
    if a.iter().chain(b).any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(abs_tol(max_magnitude(a).max(max_magnitude(b))))
}

/// Whether `d_F(A, B) <= delta` (up to the geometric tolerance).
/// `O(|A|·|B|)` time, `O(|A|)` space.
pub fn free_space_decide(a: &[Point], b: &[Point], delta: f64) -> Result<bool> {
    let tol = check_curves(a, b)?;
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {delta}")));
    }
    Ok(decide_raw(a, b, delta + tol))
}

fn decide_raw(a: &[Point], b: &[Point], r: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    if a[0].dist(b[0]) > r || a[n - 1].dist(b[m - 1]) > r {
        return false;
    }
    if n == 1 {
        return b.iter().all(|q| q.dist(a[0]) <= r);
    }
    if m == 1 {
        return a.iter().all(|q| q.dist(b[0]) <= r);
    }
    // Parameter space [0, n-1] x [0, m-1]; row j covers B's segment j.
    // bottom[i]: reachable part of the horizontal edge (A segment i, B vertex j).
    let mut bottom: Vec<Interval> = Vec::with_capacity(n - 1);
    let mut open = true;
    for i in 0..n - 1 {
        let f = if open { free_interval(b[0], a[i], a[i + 1], r) } else { None };
        let reach = match f {
            Some((lo, hi)) if lo <= 0.0 => Some((lo, hi)),
            _ => None,
        };
        open = matches!(reach, Some((_, hi)) if hi >= 1.0);
        bottom.push(reach);
    }
    // Left boundary of row j, reachable along x = 0 from the start.
    let mut left_open = true;
    for j in 0..m - 1 {
        let lf = if left_open { free_interval(a[0], b[j], b[j + 1], r) } else { None };
        let mut left: Interval = match lf {
            Some((lo, hi)) if lo <= 0.0 => Some((lo, hi)),
            _ => None,
        };
        left_open = matches!(left, Some((_, hi)) if hi >= 1.0);
        for i in 0..n - 1 {
            let bot = bottom[i];
            // Right edge: A vertex i+1 against B segment j.
            let right = match (bot, left) {
                (Some(_), _) => free_interval(a[i + 1], b[j], b[j + 1], r),
                (None, Some((llo, _))) => free_interval(a[i + 1], b[j], b[j + 1], r)
                    .and_then(|(lo, hi)| (lo.max(llo) <= hi).then_some((lo.max(llo), hi))),
                (None, None) => None,
            };
            // Top edge: A segment i against B vertex j+1.
            let top = match (left, bot) {
                (Some(_), _) => free_interval(b[j + 1], a[i], a[i + 1], r),
                (None, Some((blo, _))) => free_interval(b[j + 1], a[i], a[i + 1], r)
                    .and_then(|(lo, hi)| (lo.max(blo) <= hi).then_some((lo.max(blo), hi))),
                (None, None) => None,
            };
            bottom[i] = top;
            left = right;
        }
        if j == m - 2 {
            let via_right = matches!(left, Some((_, hi)) if hi >= 1.0);
            let via_top = matches!(bottom[n - 2], Some((_, hi)) if hi >= 1.0);
            return via_right || via_top;
        }
    }
    unreachable!("m >= 2 returns inside the loop")
}

/// Discrete Fréchet distance of the vertex sequences; an upper bound on the
/// continuous distance.
pub fn discrete_frechet(a: &[Point], b: &[Point]) -> Result<f64> {
    check_curves(a, b)?;
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut cur = vec![0.0f64; m];
    for (i, &p) in a.iter().enumerate() {
        for j in 0..m {
            let d = p.dist(b[j]);
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

/// `d_F(A, B)` within `tol`, by bisection between the endpoint lower bound
/// and the discrete (vertex-aligned) upper bound.
pub fn frechet_distance(a: &[Point], b: &[Point], tol: f64) -> Result<f64> {
    check_curves(a, b)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut lo = a[0].dist(b[0]).max(a[a.len() - 1].dist(b[b.len() - 1]));
    let mut hi = discrete_frechet(a, b)?;
    // Raw decisions: inflating by the geometric tolerance would bias the value.
    if decide_raw(a, b, lo) {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if decide_raw(a, b, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Whether `d_F(ab, C) <= delta`, in `O(|C|)`: the vertices of `C` need
/// nondecreasing parameters on `ab`, starting at 0 and ending at 1.
pub fn segment_curve_decide(a: Point, b: Point, c: &[Point], delta: f64) -> Result<bool> {
    let tol = check_curves(&[a, b], c)?;
    Ok(segment_curve_raw(a, b, c, delta + tol))
}

fn segment_curve_raw(a: Point, b: Point, c: &[Point], r: f64) -> bool {
    let mut t = 0.0f64;
    for (i, &v) in c.iter().enumerate() {
        let Some((lo, hi)) = free_interval(v, a, b, r) else { return false };
        if i == 0 && lo > 0.0 {
            return false;
        }
        t = t.max(lo);
        if t > hi {
            return false;
        }
    }
    let last = c[c.len() - 1];
    matches!(free_interval(last, a, b, r), Some((_, hi)) if hi >= 1.0)
}

/// Smallest number of vertices of a curve through a subsequence of `C`'s
/// vertices (first and last kept) whose pieces each lie within `delta` of the
/// matching stretch of `C`. Shortcut graph plus breadth-first search.
pub fn min_vertex_restricted_size(c: &[Point], delta: f64) -> Result<usize> {
    if c.len() < 2 {
        return Err(Error::Precondition("curve needs at least two vertices".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let tol = check_curves(c, c)?;
    let r = delta + tol;
    let n = c.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::from([0usize]);
    dist[0] = 1;
    while let Some(i) = queue.pop_front() {
        if i == n - 1 {
            break;
        }
        for j in i + 1..n {
            if dist[j] == usize::MAX && segment_curve_raw(c[i], c[j], &c[i..=j], r) {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    Ok(dist[n - 1])
}
