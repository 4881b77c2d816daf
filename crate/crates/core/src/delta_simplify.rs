//! Streaming δ-simplification.
//!
//! Each vertex advances the frontier once. While some cell survives, the
//! last segment of the output is the frontier witness `(p, q)`; when every
//! cell dies, that segment is finalized and a new one starts at the vertex.
//! The output stays within `(1+ε)δ` of the prefix and has at most
//! `2κ − 2` vertices, `κ` being the optimal size at tolerance `δ`.

use std::sync::Arc;

use crate::cover::{template, CoverTemplate};
use crate::error::{Error, Result};
use crate::geom::{Curve, Point};
use crate::stabber::Frontier;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Event {
    /// First vertex; the output is the single point `v`.
    Started,
    /// The frontier survived; the last segment is now the witness.
    BufferUpdated,
    /// Every cell died: the segment `(p, q)` was finalized and a new one
    /// started at the pushed vertex.
    SegmentFinalized(Point, Point),
}

pub(crate) fn check_params(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive and finite, got {delta}")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SimplifierState {
    eps: f64,
    delta: f64,
    template: Arc<CoverTemplate>,
    emitted: Vec<Point>,
    emitted_count: usize,
    retain: bool,
    buffer: Vec<Point>,
    frontier: Option<Frontier>,
    vertex_count: u64,
    hull: Vec<Point>,
}

/// Output of a finished run: the curve and the live frontier (whose anchors
/// are the grid points of the last restart).
#[derive(Clone, Debug)]
pub struct Simplified {
    pub curve: Curve,
    pub frontier: Frontier,
}

impl Simplified {
    pub fn anchors(&self) -> &[Point] {
        self.frontier.anchors()
    }
}

impl SimplifierState {
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        check_params(eps, delta)?;
        Ok(SimplifierState {
            eps,
            delta,
            template: template(eps, delta)?,
            emitted: Vec::new(),
            emitted_count: 0,
            retain: true,
            buffer: Vec::with_capacity(2),
            frontier: None,
            vertex_count: 0,
            hull: Vec::new(),
        })
    }

    /// Stops keeping finalized vertices in memory; they are still reported
    /// through [`Event::SegmentFinalized`]. [`curve`](Self::curve) then only
    /// returns the live segment.
    pub fn without_retained_output(mut self) -> Self {
        self.retain = false;
        self.emitted.clear();
        self
    }

    pub fn push(&mut self, v: Point) -> Result<Event> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        self.vertex_count += 1;
        let Some(frontier) = self.frontier.as_mut() else {
            self.buffer.clear();
            self.buffer.push(v);
            self.frontier = Some(Frontier::from_template(&self.template, v));
            return Ok(Event::Started);
        };
        self.template.hull_into(v, &mut self.hull);
        if frontier.advance_slice(&self.hull) {
            debug_assert_eq!(self.buffer.len(), 2, "a restart is never followed by another");
            let (p, q) = (self.buffer[0], *self.buffer.last().unwrap());
            if self.retain {
                self.emitted.extend_from_slice(&self.buffer);
            }
            self.emitted_count += self.buffer.len();
            self.buffer.clear();
            self.buffer.push(v);
            frontier.restart(&self.template, v);
            Ok(Event::SegmentFinalized(p, q))
        } else {
            let (p, q) = frontier.witness()?;
            self.buffer.clear();
            self.buffer.extend_from_slice(&[p, q]);
            Ok(Event::BufferUpdated)
        }
    }

    /// Finalized vertices followed by the live segment.
    pub fn curve(&self) -> Result<Curve> {
        if self.vertex_count == 0 {
            return Err(Error::Empty("no vertex pushed yet"));
        }
        let mut c = Vec::with_capacity(self.emitted.len() + 2);
        c.extend_from_slice(&self.emitted);
        c.extend_from_slice(&self.buffer);
        Ok(c)
    }

    pub fn finish(self) -> Result<Simplified> {
        let curve = self.curve()?;
        let frontier = self.frontier.expect("frontier exists once a vertex was pushed");
        Ok(Simplified { curve, frontier })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn template(&self) -> &CoverTemplate {
        &self.template
    }

    /// Finalized vertices kept in memory (all of them unless retention was
    /// switched off).
    pub fn emitted(&self) -> &[Point] {
        &self.emitted
    }

    /// Number of finalized vertices, retained or not.
    pub fn emitted_count(&self) -> usize {
        self.emitted_count
    }

    /// The live last segment: one point right after a restart, two otherwise.
    pub fn buffer(&self) -> &[Point] {
        &self.buffer
    }

    pub fn frontier(&self) -> Option<&Frontier> {
        self.frontier.as_ref()
    }

    pub fn vertex_count(&self) -> u64 {
        self.vertex_count
    }

    /// Working-storage bytes: frontier, buffer and the per-vertex hull.
    /// Finalized output is excluded.
    pub fn state_bytes(&self) -> usize {
        let pt = std::mem::size_of::<Point>();
        self.frontier.as_ref().map_or(0, Frontier::state_bytes)
            + (self.buffer.len() + self.hull.len()) * pt
    }
}

/// Pushes every vertex of `curve`, then finishes.
pub fn simplify_static(curve: &[Point], eps: f64, delta: f64) -> Result<Simplified> {
    if curve.is_empty() {
        return Err(Error::Empty("simplify_static needs at least one vertex"));
    }
    let mut s = SimplifierState::new(eps, delta)?;
    for &v in curve {
        s.push(v)?;
    }
    s.finish()
}
