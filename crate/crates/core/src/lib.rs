//! Streaming polyline simplification under the Fréchet distance.
//!
//! * [`delta_simplify`]: given `ε` and `δ`, keep a curve within `(1+ε)δ` of
//!   the stream seen so far, using working storage independent of its length.
//! * [`k_simplify`]: given `k`, keep at most `2k−2` vertices whose distance is
//!   within `1+ε` of the best `k`-vertex curve.
//! * [`frechet`]: the oracles used to check both.

pub mod cover;
pub mod delta_simplify;
pub mod error;
pub mod frechet;
pub mod geom;
pub mod k_simplify;
pub mod records;
pub mod stabber;

pub use cover::{make_template, template, CoverTemplate};
pub use delta_simplify::{simplify_static, Event, Simplified, SimplifierState};
pub use error::{Error, Result};
pub use frechet::{free_space_decide, frechet_distance, min_vertex_restricted_size, segment_curve_decide};
pub use geom::{abs_tol, rel_tol, ConvexPolygon, Curve, HalfPlane, Point, ShadowRegion};
pub use k_simplify::{compress, compress_within, delta_min, Best, CollinearFilter, Compressed, ReduceState, RunPool};
pub use records::Format;
pub use stabber::Frontier;
