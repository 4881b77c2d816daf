//! Streaming k-simplification: the collinearity pre-filter, Compress (rescale
//! δ by `ε^{-t}` and re-simplify a `(2k−1)`-vertex curve to at most `2k−2`
//! vertices), Reduce (one run with a fixed starting tolerance), and the pool
//! of runs over the geometric ladder of starting tolerances.

use crate::cover::{template, CoverTemplate};
use crate::delta_simplify::{Event, SimplifierState};
use crate::error::{Error, Result};
use crate::geom::{abs_tol, point_segment_distance, Curve, Point};
use crate::stabber::Frontier;

/// Holds back the latest vertex `y` until the next one `z` arrives; `y` is
/// dropped when it lies on the segment from the previous forwarded vertex
/// `x` to `z` (this covers duplicates), otherwise it is forwarded.
#[derive(Clone, Debug, Default)]
pub struct CollinearFilter {
    x: Option<Point>,
    y: Option<Point>,
}

impl CollinearFilter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the vertex released by `z`, if any.
    pub fn push(&mut self, z: Point) -> Option<Point> {
        match (self.x, self.y) {
            (_, None) => {
                self.y = Some(z);
                None
            }
            (None, Some(y)) => {
                self.x = Some(y);
                self.y = Some(z);
                Some(y)
            }
            (Some(x), Some(y)) => {
                let tol = abs_tol(x.magnitude().max(y.magnitude()).max(z.magnitude()));
                self.y = Some(z);
                if point_segment_distance(y, x, z) <= tol {
                    None
                } else {
                    self.x = Some(y);
                    Some(y)
                }
            }
        }
    }

    /// The held vertex, if any.
    pub fn held(&self) -> Option<Point> {
        self.y
    }

    /// Releases the held vertex at end of stream.
    pub fn flush(&mut self) -> Option<Point> {
        let y = self.y.take();
        if y.is_some() {
            self.x = y;
        }
        y
    }
}

/// `½ min d(v_i, v_{i−1}v_{i+1})` over all interior vertices.
pub fn delta_min(prefix: &[Point]) -> Result<f64> {
    if prefix.len() < 3 || prefix.len() % 2 == 0 {
        return Err(Error::Precondition(format!(
            "delta_min needs 2k-1 >= 3 vertices, got {}",
            prefix.len()
        )));
    }
    let m = interior_min(prefix, 1);
    if !(m > 0.0) {
        return Err(Error::Precondition(
            "three consecutive collinear vertices reached delta_min".into(),
        ));
    }
    Ok(0.5 * m)
}

/// Min of `d(v_i, v_{i−1}v_{i+1})` over interior indices (0-based) `1, 1+step, …`.
fn interior_min(c: &[Point], step: usize) -> f64 {
    (1..c.len() - 1)
        .step_by(step)
        .map(|i| point_segment_distance(c[i], c[i - 1], c[i + 1]))
        .fold(f64::INFINITY, f64::min)
}

/// Threshold of Compress: `½ min d(x_j, x_{j−1}x_{j+1})` over even 1-based `j`.
pub fn compress_threshold(curve: &[Point]) -> f64 {
    0.5 * interior_min(curve, 2)
}

#[derive(Clone, Debug)]
pub struct Compressed {
    pub curve: Curve,
    /// `ε^{-t}·δ`.
    pub delta: f64,
    pub t: u32,
    /// Extra `t` increments spent because the simplified curve still had more
    /// than `2k−2` vertices (never observed; kept as a guard against rounding).
    pub fallback_steps: u32,
    /// Simplifier after the last vertex, ready to continue the stream.
    pub state: SimplifierState,
}

impl Compressed {
    pub fn frontier(&self) -> &Frontier {
        self.state.frontier().expect("compress pushes at least one vertex")
    }

    pub fn anchors(&self) -> &[Point] {
        self.frontier().anchors()
    }
}

/// Simplifies a `(2k−1)`-vertex curve to at most `2k−2` vertices at tolerance
/// `ε^{-t}δ`, `t >= 1` the smallest exponent reaching the even-index threshold.
pub fn compress(curve: &[Point], eps: f64, k: usize, delta: f64) -> Result<Compressed> {
    compress_within(curve, eps, k, delta, None)
}

/// Frontier bytes right after a restart: every cell is the full cover hull.
pub fn frontier_bytes_bound(t: &CoverTemplate) -> usize {
    let pt = std::mem::size_of::<Point>();
    t.anchor_count() * (pt + 8 + pt * t.hull.len())
}

/// [`compress`] that fails with [`Error::Budget`] instead of building a
/// simplifier whose frontier could outgrow `budget` bytes.
pub fn compress_within(curve: &[Point], eps: f64, k: usize, delta: f64, budget: Option<usize>) -> Result<Compressed> {
    if k < 2 || curve.len() != 2 * k - 1 {
        return Err(Error::Precondition(format!(
            "compress needs 2k-1 vertices with k >= 2, got {} for k = {k}",
            curve.len()
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive and finite, got {delta}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if curve.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite);
    }
    let thr = compress_threshold(curve);
    let mut t = 1u32;
    let mut d = delta / eps;
    while d < thr {
        d /= eps;
        t += 1;
    }
    let mut fallback_steps = 0;
    loop {
        if let Some(b) = budget {
            let need = frontier_bytes_bound(&*template(eps, d)?);
            if need > b {
                return Err(Error::Budget(format!(
                    "a cover at epsilon {eps} needs {need} bytes per run, budget is {b}"
                )));
            }
        }
        let mut state = SimplifierState::new(eps, d)?;
        for &v in curve {
            state.push(v)?;
        }
        let out = state.curve()?;
        if out.len() <= 2 * k - 2 {
            return Ok(Compressed { curve: out, delta: d, t, fallback_steps, state });
        }
        d /= eps;
        t += 1;
        fallback_steps += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Filling,
    Streaming,
}

/// What a Reduce step did with the vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceStep {
    /// Still collecting the first `2k−1` vertices.
    Buffered,
    /// The `2k−1`-st vertex arrived: tolerances set and the prefix compressed.
    Initialized { t: u32 },
    /// Some cell survived; the last segment moved to the new witness.
    Extended,
    /// All cells died and the curve had room: a new segment starts at `v`.
    Appended,
    /// All cells died at full size: the curve plus `v` was compressed.
    Compressed { t: u32 },
}

/// One run of Reduce with run index `r`.
#[derive(Clone, Debug)]
pub struct ReduceState {
    r: u32,
    eps: f64,
    k: usize,
    prefix: Vec<Point>,
    delta_min: f64,
    delta_start: f64,
    delta: f64,
    sim: Option<SimplifierState>,
    epoch_input: Vec<Point>,
    compress_calls: u64,
    fallback_steps: u64,
    budget: Option<usize>,
}

/// Largest per-run ε accepted by [`ReduceState::new`].
pub const MAX_RUN_EPS: f64 = 1.0 / 17.0;

impl ReduceState {
    pub fn new(r: u32, eps: f64, k: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::Domain("run index r must be at least 1".into()));
        }
        if !(eps > 0.0 && eps <= MAX_RUN_EPS) {
            return Err(Error::Domain(format!("per-run epsilon must lie in (0, 1/17], got {eps}")));
        }
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        Ok(ReduceState {
            r,
            eps,
            k,
            prefix: Vec::with_capacity(2 * k - 1),
            delta_min: 0.0,
            delta_start: 0.0,
            delta: 0.0,
            sim: None,
            epoch_input: Vec::new(),
            compress_calls: 0,
            fallback_steps: 0,
            budget: None,
        })
    }

    /// Caps the frontier of this run at `bytes`; see [`compress_within`].
    pub fn with_memory_budget(mut self, bytes: usize) -> Self {
        self.budget = Some(bytes);
        self
    }

    pub fn push(&mut self, v: Point) -> Result<ReduceStep> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let cap = 2 * self.k - 2;
        let Some(sim) = self.sim.as_mut() else {
            self.prefix.push(v);
            if self.prefix.len() < cap + 1 {
                return Ok(ReduceStep::Buffered);
            }
            self.delta_min = delta_min(&self.prefix)?;
            let e = self.eps;
            self.delta_start = e * (1.0 + e).powi(self.r as i32 + 1) / (1.0 - 4.0 * e) * self.delta_min;
            let prefix = std::mem::take(&mut self.prefix);
            let t = self.adopt(compress_within(&prefix, e, self.k, self.delta_start, self.budget)?, prefix);
            return Ok(ReduceStep::Initialized { t });
        };
        match sim.push(v)? {
            Event::BufferUpdated => Ok(ReduceStep::Extended),
            Event::Started => unreachable!("simplifier already started"),
            Event::SegmentFinalized(..) => {
                let grown = sim.curve()?;
                if grown.len() <= cap {
                    Ok(ReduceStep::Appended)
                } else {
                    let c = compress_within(&grown, self.eps, self.k, self.delta, self.budget)?;
                    Ok(ReduceStep::Compressed { t: self.adopt(c, grown) })
                }
            }
        }
    }

    fn adopt(&mut self, c: Compressed, input: Vec<Point>) -> u32 {
        self.delta = c.delta;
        self.compress_calls += 1;
        self.fallback_steps += c.fallback_steps as u64;
        self.epoch_input = input;
        self.sim = Some(c.state);
        c.t
    }

    pub fn phase(&self) -> Phase {
        if self.sim.is_some() {
            Phase::Streaming
        } else {
            Phase::Filling
        }
    }

    /// Current output: the verbatim prefix while filling.
    pub fn curve(&self) -> Curve {
        match &self.sim {
            Some(s) => s.curve().expect("streaming simplifier has vertices"),
            None => self.prefix.clone(),
        }
    }

    /// Current error estimate `δ_i`; 0 while the prefix is kept verbatim.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    /// `δ_{2k−2} = ε(1+ε)^{r+1}(1−4ε)^{-1}δ_min`; 0 while filling.
    pub fn delta_start(&self) -> f64 {
        self.delta_start
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The curve handed to the most recent Compress call. With the vertices
    /// pushed since, it forms the proxy curve from which the current output
    /// can be recomputed by a single simplification at [`delta`](Self::delta).
    pub fn epoch_input(&self) -> &[Point] {
        &self.epoch_input
    }

    pub fn compress_calls(&self) -> u64 {
        self.compress_calls
    }

    pub fn fallback_steps(&self) -> u64 {
        self.fallback_steps
    }

    pub fn frontier(&self) -> Option<&Frontier> {
        self.sim.as_ref().and_then(SimplifierState::frontier)
    }

    pub fn state_bytes(&self) -> usize {
        let pt = std::mem::size_of::<Point>();
        self.sim.as_ref().map_or(0, |s| s.state_bytes() + s.emitted().len() * pt)
            + (self.prefix.len() + self.epoch_input.len()) * pt
    }
}

/// Number of runs for `eps_user`: `⌊log_{1+ε/10}(10/ε)⌋`.
pub fn run_count(eps_user: f64) -> usize {
    ((10.0 / eps_user).ln() / (1.0 + eps_user / 10.0).ln()).floor() as usize
}

/// Largest (exclusive) user ε accepted by [`RunPool::new`].
pub const MAX_USER_EPS: f64 = 1.0 / 17.0;

/// Independent Reduce runs `r = 1..=R` at `ε_user/10`, fed by one shared
/// collinearity filter. The minimum-δ run carries the answer.
#[derive(Clone, Debug)]
pub struct RunPool {
    eps_user: f64,
    k: usize,
    runs: Vec<ReduceState>,
    filter: CollinearFilter,
    pushed: u64,
    forwarded: u64,
}

/// Answer of a pool query.
#[derive(Clone, Debug, PartialEq)]
pub struct Best {
    pub curve: Curve,
    pub delta: f64,
    pub r: u32,
}

impl RunPool {
    pub fn new(eps_user: f64, k: usize) -> Result<Self> {
        if !(eps_user > 0.0 && eps_user < MAX_USER_EPS) {
            return Err(Error::Domain(format!("epsilon must lie in (0, 1/17), got {eps_user}")));
        }
        if k < 2 {
            return Err(Error::Domain(format!("k must be at least 2, got {k}")));
        }
        let mut pool = RunPool::with_runs(eps_user / 10.0, run_count(eps_user).max(1), k)?;
        pool.eps_user = eps_user;
        Ok(pool)
    }

    /// Runs `r = 1..=runs` at an explicit per-run `ε ∈ (0, 1/17]`. The
    /// approximation guarantee of [`new`](Self::new) needs the full ladder at
    /// `ε_user/10`; this constructor exists for experiments at coarser ε.
    pub fn with_runs(eps_run: f64, runs: usize, k: usize) -> Result<Self> {
        if runs == 0 {
            return Err(Error::Domain("a pool needs at least one run".into()));
        }
        let runs = (1..=runs as u32).map(|r| ReduceState::new(r, eps_run, k)).collect::<Result<Vec<_>>>()?;
        Ok(RunPool {
            eps_user: eps_run * 10.0,
            k,
            runs,
            filter: CollinearFilter::new(),
            pushed: 0,
            forwarded: 0,
        })
    }

    /// Splits `bytes` evenly over the runs; a Compress that would exceed its
    /// share fails with [`Error::Budget`] before allocating.
    pub fn with_memory_budget(mut self, bytes: usize) -> Self {
        let share = bytes / self.runs.len();
        self.runs = self.runs.into_iter().map(|r| r.with_memory_budget(share)).collect();
        self
    }

    pub fn push(&mut self, v: Point) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        self.pushed += 1;
        if let Some(y) = self.filter.push(v) {
            self.forward(y)?;
        }
        Ok(())
    }

    fn forward(&mut self, y: Point) -> Result<()> {
        self.forwarded += 1;
        for run in &mut self.runs {
            run.push(y)?;
        }
        Ok(())
    }

    /// Minimum-δ run over the vertices forwarded so far (the filter holds the
    /// latest vertex back until the next one arrives or [`finish`](Self::finish)).
    pub fn best(&self) -> Result<Best> {
        if self.pushed == 0 {
            return Err(Error::Empty("no vertex pushed yet"));
        }
        if self.forwarded == 0 {
            let held = self.filter.held().expect("a pushed vertex is held or forwarded");
            return Ok(Best { curve: vec![held], delta: 0.0, r: 1 });
        }
        let run = self
            .runs
            .iter()
            .min_by(|a, b| a.delta().total_cmp(&b.delta()).then(a.r().cmp(&b.r())))
            .expect("pool has at least one run");
        Ok(Best { curve: run.curve(), delta: run.delta(), r: run.r() })
    }

    /// Flushes the filter and returns the final answer.
    pub fn finish(mut self) -> Result<Best> {
        if let Some(y) = self.filter.flush() {
            self.forward(y)?;
        }
        self.best()
    }

    pub fn runs(&self) -> &[ReduceState] {
        &self.runs
    }

    pub fn eps_user(&self) -> f64 {
        self.eps_user
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn state_bytes(&self) -> usize {
        self.runs.iter().map(ReduceState::state_bytes).sum()
    }
}
