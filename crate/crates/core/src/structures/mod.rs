//! The three presentations of a space on a finite carrier: L-metrics with
//! gauge bases, approach distances, and approach system bases.

use thiserror::Error;

use crate::limits::SizeGuard;

mod carrier;
mod distance;
mod gauge;
mod metric;
mod system;

pub use carrier::{Carrier, PointSet, MAX_POINTS};
pub use distance::ApproachDistance;
pub use gauge::{check_gauge_axioms, is_locally_directed, locally_directed_witness, locally_supported, GaugeAxiom, GaugeBase};
pub use metric::{enumerate_metrics, validate_lmetric, LMetric};
pub use system::{enumerate_functions, function_leq, function_meet, render, supported, ApproachSystemBase, LFunction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("a carrier needs at least one point")]
    EmptyCarrier,
    #[error("{0} points declared; at most 64 are supported")]
    CarrierTooLarge(usize),
    #[error("point `{0}` is declared twice")]
    DuplicatePoint(String),
    #[error("table has {found} entries, expected {expected}")]
    TableShape { expected: usize, found: usize },
    #[error("d({0},{0}) is not top")]
    NotReflexiveTop(String),
    #[error("triangle law fails: d({0},{1}) * d({1},{2}) is not below d({0},{2})")]
    TriangleViolation(String, String, String),
    #[error("a gauge base needs at least one metric")]
    EmptyGaugeBase,
    #[error("base is not locally directed: the meet of metrics {0:?} is not supported")]
    NotLocallyDirected(Vec<usize>),
    #[error("delta({0}, {{{0}}}) is not top")]
    AxiomPoint(String),
    #[error("delta({0}, {{}}) is not bottom")]
    AxiomEmpty(String),
    #[error("union law fails at {0}: delta({0}, {1} u {2}) is not the join")]
    AxiomUnion(String, String, String),
    #[error("tower law fails at {0}: A = {1}, alpha = {2}")]
    AxiomTower(String, String, String),
    #[error("delta({0}, {{{1}}}) is not given")]
    MissingSingleton(String, String),
    #[error("B({0}) is empty")]
    EmptySystemBase(String),
    #[error("B({0}) is not a filter base: no member lies below the meet of [{1}] and [{2}]")]
    NotFilterBase(String, String, String),
    #[error("B({0}) holds [{1}], which is not top at {0}")]
    NotTopAtPoint(String, String),
    #[error("mixing fails at {0} for [{1}] with alpha = {2}, omega = {3}")]
    MixingFails(String, String, String, String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuard),
}
