use std::collections::HashSet;
use std::sync::Arc;

use crate::limits::{Limits, SizeGuard};
use crate::quantale::Quantale;

use super::metric::enumerate_metrics;
use super::{Carrier, LMetric, StructureError};

/// `d` is locally supported by `h`: for every point `x` and every support
/// test `(α, ω)` some `e ∈ h` has `e(x,y) ∗ α ≤ d(x,y) ∨ ω` for all `y`.
pub fn locally_supported(q: &Quantale, d: &LMetric, h: &[LMetric]) -> bool {
    let n = d.size();
    (0..n).all(|x| {
        (0..q.strongest_tests().len()).all(|t| {
            h.iter()
                .any(|e| (0..n).all(|y| q.within(t, e.get(x, y), d.get(x, y))))
        })
    })
}

/// First subset of `h` (by index, in bitmask order) whose pointwise meet is
/// not locally supported by `h`.
pub fn locally_directed_witness(q: &Quantale, h: &[LMetric], limits: &Limits) -> Result<Option<Vec<usize>>, SizeGuard> {
    SizeGuard::check(
        "local directedness over base subsets",
        h.len() as u128,
        limits.directed_base.min(63) as u128,
    )?;
    let Some(first) = h.first() else {
        return Ok(None);
    };
    let n = first.size();
    let mut seen = HashSet::new();
    for mask in 0u64..(1u64 << h.len()) {
        let meet = h
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(LMetric::indiscrete(q, n), |acc, (_, d)| acc.meet(q, d));
        if !seen.insert(meet.clone()) {
            continue;
        }
        if !locally_supported(q, &meet, h) {
            return Ok(Some((0..h.len()).filter(|i| mask >> i & 1 == 1).collect()));
        }
    }
    Ok(None)
}

/// Every subset's meet (the empty meet being constantly `⊤`) is locally
/// supported by `h`.
pub fn is_locally_directed(q: &Quantale, h: &[LMetric], limits: &Limits) -> Result<bool, SizeGuard> {
    Ok(locally_directed_witness(q, h, limits)?.is_none())
}

/// An L-gauge presented by a base `H`; the gauge itself is the local
/// saturation `H̃`, decided by [`GaugeBase::contains`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeBase {
    quantale: Arc<Quantale>,
    carrier: Carrier,
    metrics: Vec<LMetric>,
}

impl GaugeBase {
    /// Validates each metric and local directedness. Duplicates are dropped.
    pub fn new(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        metrics: Vec<LMetric>,
        limits: &Limits,
    ) -> Result<Self, StructureError> {
        let base = Self::without_directedness(quantale, carrier, metrics)?;
        if let Some(subset) = locally_directed_witness(&base.quantale, &base.metrics, limits)? {
            return Err(StructureError::NotLocallyDirected(subset));
        }
        Ok(base)
    }

    /// Validates each metric but skips the local directedness check. Used for
    /// generated bases such as initial lifts, whose saturation is still well
    /// defined.
    pub fn without_directedness(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        metrics: Vec<LMetric>,
    ) -> Result<Self, StructureError> {
        if metrics.is_empty() {
            return Err(StructureError::EmptyGaugeBase);
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(metrics.len());
        for d in metrics {
            if d.size() != carrier.len() {
                return Err(StructureError::TableShape {
                    expected: carrier.len() * carrier.len(),
                    found: d.size() * d.size(),
                });
            }
            if !d.is_valid(&quantale) {
                // re-run the checked path for a witness
                super::metric::validate_lmetric(&quantale, &carrier, d.values().to_vec())?;
            }
            if seen.insert(d.clone()) {
                kept.push(d);
            }
        }
        Ok(GaugeBase {
            quantale,
            carrier,
            metrics: kept,
        })
    }

    /// The base `{d_dis}`.
    pub fn discrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let d = LMetric::discrete(&quantale, carrier.len());
        GaugeBase {
            quantale,
            carrier,
            metrics: vec![d],
        }
    }

    /// The base holding the constantly `⊤` metric.
    pub fn indiscrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let d = LMetric::indiscrete(&quantale, carrier.len());
        GaugeBase {
            quantale,
            carrier,
            metrics: vec![d],
        }
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn metrics(&self) -> &[LMetric] {
        &self.metrics
    }

    /// Membership in the gauge `H̃`.
    pub fn contains(&self, d: &LMetric) -> bool {
        locally_supported(&self.quantale, d, &self.metrics)
    }

    pub fn is_locally_directed(&self, limits: &Limits) -> Result<bool, SizeGuard> {
        is_locally_directed(&self.quantale, &self.metrics, limits)
    }

    /// Every L-metric in the gauge.
    pub fn enumerate(&self, limits: &Limits) -> Result<Vec<LMetric>, SizeGuard> {
        Ok(enumerate_metrics(&self.quantale, self.carrier.len(), limits)?
            .into_iter()
            .filter(|d| self.contains(d))
            .collect())
    }
}

/// Which gauge axiom an explicit set of metrics breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaugeAxiom {
    NonEmpty,
    UpClosed,
    MeetClosed,
    Saturated,
}

/// Checks an explicit set against the gauge axioms, given every L-metric on
/// the carrier.
pub fn check_gauge_axioms(q: &Quantale, set: &[LMetric], all: &[LMetric]) -> Result<(), GaugeAxiom> {
    if set.is_empty() {
        return Err(GaugeAxiom::NonEmpty);
    }
    let members: HashSet<&LMetric> = set.iter().collect();
    for d in set {
        if all.iter().any(|e| d.leq(q, e) && !members.contains(e)) {
            return Err(GaugeAxiom::UpClosed);
        }
        for e in set {
            if !members.contains(&d.meet(q, e)) {
                return Err(GaugeAxiom::MeetClosed);
            }
        }
    }
    if all.iter().any(|d| !members.contains(d) && locally_supported(q, d, set)) {
        return Err(GaugeAxiom::Saturated);
    }
    Ok(())
}
