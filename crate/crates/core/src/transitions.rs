//! Conversions between gauge bases, approach distances and approach system
//! bases.
//!
//! Infima over a gauge or a system can be taken over the given base
//! ([`Mode::Base`]) or over the full saturated structure, enumerated
//! exhaustively ([`Mode::Oracle`]). The two coincide for integral quantales
//! but not in general.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limits::{Limits, SizeGuard};
use crate::quantale::{Elem, Quantale};
use crate::structures::{
    enumerate_functions, enumerate_metrics, function_leq, ApproachDistance, ApproachSystemBase, GaugeBase, LFunction,
    LMetric, PointSet, StructureError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Base,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransitionError {
    #[error(transparent)]
    SizeGuard(#[from] SizeGuard),
    #[error("transition produced an invalid structure: {0}")]
    Invalid(StructureError),
}

impl From<StructureError> for TransitionError {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::SizeGuard(g) => TransitionError::SizeGuard(g),
            other => TransitionError::Invalid(other),
        }
    }
}

fn distance_guard(n: usize, limits: &Limits) -> Result<(), SizeGuard> {
    SizeGuard::check(
        "distance table over all subsets",
        n as u128,
        limits.distance_points.min(24) as u128,
    )
}

/// `⋀_{f ∈ family} ⋁_{a ∈ A} f(a)` for every `A`, as one distance row.
fn infimum_row(q: &Quantale, n: usize, family: &[&[Elem]]) -> Vec<Elem> {
    let l = q.lattice();
    PointSet::all(n)
        .map(|a| l.meet_all(family.iter().map(|f| l.join_all(a.iter().map(|y| f[y])))))
        .collect()
}

/// `δ(x, A) = ⋀_{d ∈ G} ⋁_{a ∈ A} d(x, a)`.
pub fn gauge_to_distance(g: &GaugeBase, mode: Mode, limits: &Limits) -> Result<ApproachDistance, TransitionError> {
    let q = g.quantale();
    let n = g.carrier().len();
    distance_guard(n, limits)?;
    let enumerated;
    let metrics: &[LMetric] = match mode {
        Mode::Base => g.metrics(),
        Mode::Oracle => {
            enumerated = g.enumerate(limits)?;
            &enumerated
        }
    };
    let mut values = Vec::with_capacity(n << n);
    for x in 0..n {
        let rows: Vec<&[Elem]> = metrics.iter().map(|d| d.row(x)).collect();
        values.extend(infimum_row(q, n, &rows));
    }
    Ok(ApproachDistance::checked(q.clone(), g.carrier().clone(), values)?)
}

/// `φ ∈ A(x)` iff `δ(x, A) ≤ ⋁_{a ∈ A} φ(a)` for every `A`.
pub fn distance_system_contains(delta: &ApproachDistance, x: usize, phi: &[Elem]) -> bool {
    let q = delta.quantale();
    let l = q.lattice();
    PointSet::all(delta.carrier().len()).all(|a| q.leq(delta.get(x, a), l.join_all(a.iter().map(|y| phi[y]))))
}

/// `d ∈ G` iff `δ(x, A) ≤ ⋁_{a ∈ A} d(x, a)` for every `x` and `A`.
pub fn distance_gauge_contains(delta: &ApproachDistance, d: &LMetric) -> bool {
    (0..delta.carrier().len()).all(|x| distance_system_contains(delta, x, d.row(x)))
}

/// Pointwise-minimal members, in input order.
fn minimal<T>(items: Vec<T>, leq: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let keep: Vec<bool> = items
        .iter()
        .map(|a| !items.iter().any(|b| leq(b, a) && !leq(a, b)))
        .collect();
    items.into_iter().zip(keep).filter_map(|(a, k)| k.then_some(a)).collect()
}

/// Materializes `A(x)` for every `x` and keeps the minimal functions as the
/// base. The result is validated, mixing axiom included.
pub fn distance_to_system(delta: &ApproachDistance, limits: &Limits) -> Result<ApproachSystemBase, TransitionError> {
    let q = delta.quantale();
    let n = delta.carrier().len();
    let all = enumerate_functions(q, n, limits)?;
    let bases: Vec<Vec<LFunction>> = (0..n)
        .map(|x| {
            let members: Vec<LFunction> = all
                .iter()
                .filter(|phi| distance_system_contains(delta, x, phi))
                .cloned()
                .collect();
            minimal(members, |a, b| function_leq(q, a, b))
        })
        .collect();
    Ok(ApproachSystemBase::new(q.clone(), delta.carrier().clone(), bases)?)
}

/// Every L-metric whose rows all lie in the system.
pub fn system_gauge_members(b: &ApproachSystemBase, limits: &Limits) -> Result<Vec<LMetric>, SizeGuard> {
    let n = b.carrier().len();
    Ok(enumerate_metrics(b.quantale(), n, limits)?
        .into_iter()
        .filter(|d| (0..n).all(|x| b.contains(x, d.row(x))))
        .collect())
}

/// Every L-metric in the gauge of a distance.
pub fn distance_gauge_members(delta: &ApproachDistance, limits: &Limits) -> Result<Vec<LMetric>, SizeGuard> {
    Ok(enumerate_metrics(delta.quantale(), delta.carrier().len(), limits)?
        .into_iter()
        .filter(|d| distance_gauge_contains(delta, d))
        .collect())
}

fn minimal_base(q: &Arc<Quantale>, g: &crate::structures::Carrier, members: Vec<LMetric>) -> Result<GaugeBase, TransitionError> {
    let base = minimal(members, |a, b| a.leq(q, b));
    Ok(GaugeBase::without_directedness(q.clone(), g.clone(), base)?)
}

/// `G = {d : d(x, ·) ∈ A(x) for all x}`, presented by its minimal members.
pub fn system_to_gauge(b: &ApproachSystemBase, limits: &Limits) -> Result<GaugeBase, TransitionError> {
    minimal_base(b.quantale(), b.carrier(), system_gauge_members(b, limits)?)
}

/// `G = {d : δ(x, A) ≤ ⋁_{a ∈ A} d(x, a)}`, presented by its minimal members.
pub fn distance_to_gauge(delta: &ApproachDistance, limits: &Limits) -> Result<GaugeBase, TransitionError> {
    minimal_base(delta.quantale(), delta.carrier(), distance_gauge_members(delta, limits)?)
}

/// `δ(x, A) = ⋀_{φ ∈ A(x)} ⋁_{a ∈ A} φ(a)`.
pub fn system_to_distance(b: &ApproachSystemBase, mode: Mode, limits: &Limits) -> Result<ApproachDistance, TransitionError> {
    let q = b.quantale();
    let n = b.carrier().len();
    distance_guard(n, limits)?;
    let mut values = Vec::with_capacity(n << n);
    for x in 0..n {
        let saturated;
        let family: Vec<&[Elem]> = match mode {
            Mode::Base => b.base(x).iter().map(|f| f.as_slice()).collect(),
            Mode::Oracle => {
                saturated = b.saturation(x, limits)?;
                saturated.iter().map(|f| f.as_slice()).collect()
            }
        };
        values.extend(infimum_row(q, n, &family));
    }
    Ok(ApproachDistance::checked(q.clone(), b.carrier().clone(), values)?)
}
