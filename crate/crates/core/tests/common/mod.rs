//! Generators and brute-force oracles shared by the integration tests. None of
//! the oracles call into the library code they check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streamplify::cover::cover_at;
use streamplify::{make_template, ConvexPolygon, Frontier, Point};

pub fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

pub fn random_walk<R: Rng>(rng: &mut R, n: usize, step: f64) -> Vec<Point> {
    let mut q = p(0.0, 0.0);
    (0..n)
        .map(|i| {
            if i > 0 {
                q = q + p(rng.gen_range(-step..step), rng.gen_range(-step..step));
            }
            q
        })
        .collect()
}

/// `(i·dx, ±h)` with small jitter on both coordinates.
pub fn zigzag<R: Rng>(rng: &mut R, n: usize, dx: f64, h: f64, jitter: f64) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let y = if i % 2 == 1 { h } else { 0.0 };
            let j = |r: &mut R| if jitter > 0.0 { r.gen_range(-jitter..jitter) } else { 0.0 };
            p(i as f64 * dx + j(rng), y + j(rng))
        })
        .collect()
}

/// Random walk whose heading changes slowly.
pub fn smooth_walk<R: Rng>(rng: &mut R, n: usize, step: f64, turn: f64) -> Vec<Point> {
    let mut q = p(0.0, 0.0);
    let mut a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (0..n)
        .map(|i| {
            if i > 0 {
                a += rng.gen_range(-turn..turn);
                q = q + p(step * a.cos(), step * a.sin());
            }
            q
        })
        .collect()
}

pub fn scale(c: &[Point]) -> f64 {
    c.iter().fold(1.0f64, |m, q| m.max(q.x.abs()).max(q.y.abs()))
}

/// Points every `h` along the curve (vertices included).
pub fn densify(c: &[Point], h: f64) -> Vec<Point> {
    if c.len() == 1 {
        return c.to_vec();
    }
    let mut out = vec![c[0]];
    for w in c.windows(2) {
        let len = ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
        let m = ((len / h).ceil() as usize).max(1);
        for s in 1..=m {
            let t = s as f64 / m as f64;
            out.push(p(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y)));
        }
    }
    out
}

fn d(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Discrete Fréchet distance by the textbook quadratic table.
pub fn discrete_frechet_table(a: &[Point], b: &[Point]) -> f64 {
    let (n, m) = (a.len(), b.len());
    let mut t = vec![vec![0.0f64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let c = d(a[i], b[j]);
            t[i][j] = if i == 0 && j == 0 {
                c
            } else if i == 0 {
                t[0][j - 1].max(c)
            } else if j == 0 {
                t[i - 1][0].max(c)
            } else {
                t[i - 1][j].min(t[i - 1][j - 1]).min(t[i][j - 1]).max(c)
            };
        }
    }
    t[n - 1][m - 1]
}

/// Exhaustive matching over curves sampled every `h`: the result `r` satisfies
/// `d_F <= r <= d_F + h`.
pub fn discretized_frechet(a: &[Point], b: &[Point], h: f64) -> f64 {
    discrete_frechet_table(&densify(a, h), &densify(b, h))
}

/// Parameter interval of the segment `ab` inside the closed convex polygon
/// `poly` (counterclockwise, at least three vertices), widened by `tol`.
pub fn segment_in_polygon(a: Point, b: Point, poly: &[Point], tol: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let n = poly.len();
    for i in 0..n {
        let (u, v) = (poly[i], poly[(i + 1) % n]);
        let e = p(v.x - u.x, v.y - u.y);
        let len = (e.x * e.x + e.y * e.y).sqrt();
        // Signed distance left of the edge, positive inside.
        let f = |z: Point| (e.x * (z.y - u.y) - e.y * (z.x - u.x)) / len + tol;
        let (fa, fb) = (f(a), f(b));
        if fa < 0.0 && fb < 0.0 {
            return None;
        }
        if fa < 0.0 {
            lo = lo.max(fa / (fa - fb));
        } else if fb < 0.0 {
            hi = hi.min(fa / (fa - fb));
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Whether `ab` meets the polygons in order: a nondecreasing choice of one
/// parameter per polygon exists.
pub fn stabs_in_order_oracle(a: Point, b: Point, polys: &[Vec<Point>], tol: f64) -> bool {
    let mut t = 0.0f64;
    for poly in polys {
        match segment_in_polygon(a, b, poly, tol) {
            Some((lo, hi)) if hi >= t => t = t.max(lo),
            _ => return false,
        }
    }
    true
}

/// Smallest vertex-restricted simplification by trying every subset of the
/// interior vertices, smallest first; each piece checked with `decide`.
pub fn kvr_subsets(c: &[Point], delta: f64, decide: impl Fn(&[Point], &[Point], f64) -> bool) -> usize {
    let n = c.len();
    let inner = n - 2;
    let mut best = n;
    for mask in 0u32..(1 << inner) {
        let size = mask.count_ones() as usize + 2;
        if size >= best {
            continue;
        }
        let mut idx = vec![0];
        idx.extend((0..inner).filter(|b| mask >> b & 1 == 1).map(|b| b + 1));
        idx.push(n - 1);
        if idx.windows(2).all(|w| decide(&[c[w[0]], c[w[1]]], &c[w[0]..=w[1]], delta)) {
            best = size;
        }
    }
    best
}

/// Smallest exponent `t >= 1` with `delta·eps^{-t} >= thr`, from logarithms.
pub fn exponent_by_logs(delta: f64, eps: f64, thr: f64) -> u32 {
    if thr <= delta / eps {
        return 1;
    }
    let t = ((thr / delta).ln() / (1.0 / eps).ln()).ceil() as i64;
    // Guard the boundary against rounding in the logarithms.
    let mut t = t.max(1) as i32;
    while delta / eps.powi(t) < thr * (1.0 - 1e-12) {
        t += 1;
    }
    while t > 1 && delta / eps.powi(t - 1) >= thr * (1.0 + 1e-12) {
        t -= 1;
    }
    t as u32
}

/// Dense search for the best curve with at most `k` vertices under `dist`:
/// every vertex-restricted candidate seeds a pattern search over all 2k
/// coordinates, refined until the step is below `resolution · best`.
/// Returns an upper bound on the optimum that is tight up to the search.
pub fn best_k_curve(
    tau: &[Point],
    k: usize,
    resolution: f64,
    dist: impl Fn(&[Point], &[Point]) -> f64,
) -> (Vec<Point>, f64) {
    let n = tau.len();
    if n <= k {
        return (tau.to_vec(), 0.0);
    }
    // Seeds: all index subsets containing the endpoints (n ≤ 60, k ≤ 4).
    let mut seeds: Vec<(f64, Vec<Point>)> = Vec::new();
    let mut idx = vec![0usize; k];
    fn rec(
        pos: usize,
        from: usize,
        idx: &mut Vec<usize>,
        n: usize,
        tau: &[Point],
        dist: &dyn Fn(&[Point], &[Point]) -> f64,
        seeds: &mut Vec<(f64, Vec<Point>)>,
    ) {
        let k = idx.len();
        if pos == k - 1 {
            idx[pos] = n - 1;
            let c: Vec<Point> = idx.iter().map(|&i| tau[i]).collect();
            seeds.push((dist(&c, tau), c));
            return;
        }
        for i in from..n - 1 {
            idx[pos] = i;
            rec(pos + 1, i + 1, idx, n, tau, dist, seeds);
        }
    }
    idx[0] = 0;
    rec(1, 1, &mut idx, n, tau, &dist, &mut seeds);
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(6);
    let span = scale(tau);
    let mut best = (seeds[0].1.clone(), seeds[0].0);
    for (d0, c0) in seeds {
        let (mut c, mut d) = (c0, d0);
        let mut step = span / 8.0;
        while step > resolution * d.max(1e-12) {
            let mut improved = false;
            for v in 0..k {
                for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.7, 0.7), (-0.7, 0.7), (0.7, -0.7), (-0.7, -0.7)] {
                    let mut t = c.clone();
                    t[v] = p(t[v].x + dx * step, t[v].y + dy * step);
                    let dt = dist(&t, tau);
                    if dt < d {
                        c = t;
                        d = dt;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Frozen after measuring random walks, zigzags and smooth walks at
/// ε ∈ {0.9, 0.75, 0.5, 0.25, 0.1}: maxima 10.1 and 721.
pub const C_S: f64 = 12.0;
pub const C_TOTAL: f64 = 800.0;

pub fn sample_in(poly: &ConvexPolygon, rng: &mut impl Rng) -> Point {
    let v = poly.vertices();
    let (mut lo, mut hi) = (v[0], v[0]);
    for &q in v {
        lo = p(lo.x.min(q.x), lo.y.min(q.y));
        hi = p(hi.x.max(q.x), hi.y.max(q.y));
    }
    loop {
        let z = p(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if poly.contains_tol(z, 0.0) {
            return z;
        }
    }
}

/// Returns (checked, disagreements outside the slack band, inside it, members).
pub fn membership_equivalence(seed: u64, eps: f64, samples: usize) -> (usize, usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = make_template(eps, 1.0).unwrap();
    let n = rng.gen_range(2..=8);
    let mut v = vec![p(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))];
    for _ in 1..n {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = rng.gen_range(0.1..1.6);
        v.push(*v.last().unwrap() + p(r * a.cos(), r * a.sin()));
    }
    let (anchors, h0) = cover_at(&t, v[0]);
    let mut f = Frontier::init(anchors).unwrap();
    let mut hulls = vec![h0.vertices().to_vec()];
    let (mut checked, mut hard, mut soft, mut members) = (0, 0, 0, 0);
    let slack = 1e-6;
    for &x in &v[1..] {
        let (_, h) = cover_at(&t, x);
        f.advance(&h);
        hulls.push(h.vertices().to_vec());
        for k in 0..f.len() {
            let pk = f.anchors()[k];
            let cell = f.cell_polygon(k);
            for _ in 0..samples {
                let z = sample_in(&h, &mut rng);
                let member = !cell.is_empty() && cell.contains_tol(z, 1e-9);
                let stabs = stabs_in_order_oracle(pk, z, &hulls, 1e-9);
                checked += 1;
                members += member as usize;
                if member != stabs {
                    let flips = stabs_in_order_oracle(pk, z, &hulls, slack)
                        != stabs_in_order_oracle(pk, z, &hulls, -slack);
                    if flips || (!cell.is_empty() && cell.boundary_distance(z) <= slack) {
                        soft += 1;
                    } else {
                        hard += 1;
                    }
                }
            }
        }
    }
    (checked, hard, soft, members)
}

