//! Exact computation with finite quantale-valued approach spaces.
//!
//! A space over a finite quantale `L` can be presented three ways: by an
//! L-gauge (a saturated family of L-metrics, given here by a base), by an
//! L-approach distance `δ(x, A)`, or by an L-approach system (per-point
//! filters of functions `X → L`). This crate validates all three, converts
//! between them, and decides local T0, local T1, closedness of a point and
//! D-connectedness both through value conditions on the structure and
//! through the initial-lift definitions, built out of wedges, axis maps and
//! folding maps.
//!
//! Everything is exhaustive and exact; budgets live in [`Limits`].

pub mod axioms;
pub mod constructions;
pub mod harness;
pub mod io;
pub mod limits;
pub mod quantale;
pub mod structures;
pub mod transitions;

pub use limits::{Limits, SizeGuard};
pub use quantale::{Elem, Lattice, LatticeError, Quantale, QuantaleError};
pub use structures::{ApproachDistance, ApproachSystemBase, Carrier, GaugeBase, LFunction, LMetric, PointSet, StructureError};
