//! Budgets for the exhaustive procedures.
//!
//! Every enumeration in this crate is exact, which means its cost is
//! exponential in some input size. Each such procedure checks its budget up
//! front and fails with [`SizeGuard`] instead of running away.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exhaustive procedure would exceed its configured budget.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("size guard: {what} would need {needed}, limit is {limit}")]
pub struct SizeGuard {
    pub what: &'static str,
    pub needed: u128,
    pub limit: u128,
}

impl SizeGuard {
    pub fn check(what: &'static str, needed: u128, limit: u128) -> Result<(), SizeGuard> {
        if needed > limit {
            Err(SizeGuard {
                what,
                needed,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    /// Largest lattice for the subset sweeps behind the well-below and
    /// well-above relations.
    pub lattice_elements: usize,
    /// Largest base for the local-directedness check (2^n subsets).
    pub directed_base: usize,
    /// Candidate tables |L|^(|X|^2 - |X|) for metric enumeration.
    pub metric_candidates: u64,
    /// Candidate functions |L|^|X| for approach-system enumeration.
    pub function_candidates: u64,
    /// Largest carrier of a distance table (2^n subsets per point).
    pub distance_points: usize,
    /// Largest product carrier.
    pub product_points: usize,
    /// Largest initial base after deduplication.
    pub initial_base: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            lattice_elements: 16,
            directed_base: 12,
            metric_candidates: 2_000_000,
            function_candidates: 1_000_000,
            distance_points: 16,
            product_points: 64,
            initial_base: 10_000,
        }
    }
}

/// `base^exp` saturating at `u128::MAX`.
pub(crate) fn power(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
