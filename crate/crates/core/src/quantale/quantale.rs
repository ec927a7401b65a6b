//! Quantales: a finite lattice with an associative tensor that distributes
//! over arbitrary joins on both sides.

use std::fmt;

use thiserror::Error;

use super::lattice::{Elem, Lattice, Relation};
use crate::limits::{Limits, SizeGuard};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(⋁S) ∗ β = ⋁{s ∗ β}`
    Left,
    /// `β ∗ (⋁S) = ⋁{β ∗ s}`
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => f.write_str("left"),
            Side::Right => f.write_str("right"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantaleError {
    #[error("tensor table has {found} entries, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("tensor is not associative: ({a} * {b}) * {c} != {a} * ({b} * {c})")]
    NotAssociative { a: String, b: String, c: String },
    #[error("tensor does not distribute over joins on the {side}: S = {{{}}}, beta = {beta}", subset.join(", "))]
    NotJoinDistributive {
        side: Side,
        subset: Vec<String>,
        beta: String,
    },
    #[error(transparent)]
    SizeGuard(#[from] SizeGuard),
}

/// One instance `(α, ω)` of the support quantifier `∀α ◁ ⊤, ∀⊥ ≺ ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportTest {
    pub alpha: Elem,
    pub omega: Elem,
}

/// A validated finite quantale with its derived relations cached.
#[derive(Debug, Clone)]
pub struct Quantale {
    lattice: Lattice,
    star: Vec<Elem>,
    commutative: bool,
    integral: bool,
    completely_distributive: bool,
    well_below: Relation,
    well_above: Relation,
    tests: Vec<SupportTest>,
    strongest_tests: Vec<SupportTest>,
    /// `within[t][e * n + d]` caches `e ∗ α_t ≤ d ∨ ω_t` for the strongest tests.
    within: Vec<Vec<bool>>,
}

impl PartialEq for Quantale {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.star == other.star
    }
}

impl Eq for Quantale {}

impl Quantale {
    /// Validates `star` (row-major over `lattice` elements) as a quantale
    /// tensor with the default limits.
    pub fn new(lattice: Lattice, star: Vec<Elem>) -> Result<Self, QuantaleError> {
        Self::with_limits(lattice, star, &Limits::default())
    }

    pub fn with_limits(lattice: Lattice, star: Vec<Elem>, limits: &Limits) -> Result<Self, QuantaleError> {
        let n = lattice.len();
        if star.len() != n * n || star.iter().any(|e| e.index() >= n) {
            return Err(QuantaleError::TableSize {
                expected: n * n,
                found: star.len(),
            });
        }
        SizeGuard::check(
            "subset sweep over lattice elements",
            n as u128,
            limits.lattice_elements.min(30) as u128,
        )?;
        if let Some((a, b, c)) = associativity_failure(&lattice, &star) {
            return Err(QuantaleError::NotAssociative {
                a: lattice.name(a).to_string(),
                b: lattice.name(b).to_string(),
                c: lattice.name(c).to_string(),
            });
        }
        if let Some((side, mask, beta)) = distributivity_failure(&lattice, &star) {
            let subset = lattice
                .elements()
                .filter(|e| mask & (1 << e.index()) != 0)
                .map(|e| lattice.name(e).to_string())
                .collect();
            return Err(QuantaleError::NotJoinDistributive {
                side,
                subset,
                beta: lattice.name(beta).to_string(),
            });
        }
        let well_below = lattice.well_below_relation(limits.lattice_elements)?;
        let well_above = lattice.well_above_relation(limits.lattice_elements)?;
        let completely_distributive = lattice.completely_distributive_with(&well_below);
        let get = |a: Elem, b: Elem| star[a.index() * n + b.index()];
        let commutative = lattice.elements().all(|a| lattice.elements().all(|b| get(a, b) == get(b, a)));
        let top = lattice.top();
        let integral = lattice.elements().all(|a| get(a, top) == a && get(top, a) == a);

        let tests: Vec<SupportTest> = lattice
            .elements()
            .filter(|&a| well_below.holds(a, top))
            .flat_map(|alpha| {
                lattice
                    .elements()
                    .filter(|&w| well_above.holds(lattice.bottom(), w))
                    .map(move |omega| SupportTest { alpha, omega })
            })
            .collect();
        // A test with larger α and smaller ω is at least as demanding, since
        // the tensor is monotone; keep only the undominated ones.
        let strongest_tests: Vec<SupportTest> = tests
            .iter()
            .copied()
            .filter(|t| {
                !tests.iter().any(|s| {
                    s != t && lattice.leq(t.alpha, s.alpha) && lattice.leq(s.omega, t.omega)
                })
            })
            .collect();
        let within = strongest_tests
            .iter()
            .map(|t| {
                let mut table = vec![false; n * n];
                for e in lattice.elements() {
                    for d in lattice.elements() {
                        table[e.index() * n + d.index()] =
                            lattice.leq(get(e, t.alpha), lattice.join(d, t.omega));
                    }
                }
                table
            })
            .collect();

        Ok(Quantale {
            lattice,
            star,
            commutative,
            integral,
            completely_distributive,
            well_below,
            well_above,
            tests,
            strongest_tests,
            within,
        })
    }

    /// The lattice with `∗ = ∧`. Fails unless the lattice is distributive.
    pub fn meet(lattice: Lattice) -> Result<Self, QuantaleError> {
        let star = meet_table(&lattice);
        Self::new(lattice, star)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    #[inline]
    pub fn star(&self, a: Elem, b: Elem) -> Elem {
        self.star[a.index() * self.lattice.len() + b.index()]
    }

    pub fn star_table(&self) -> &[Elem] {
        &self.star
    }

    #[inline]
    pub fn top(&self) -> Elem {
        self.lattice.top()
    }

    #[inline]
    pub fn bottom(&self) -> Elem {
        self.lattice.bottom()
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.lattice.leq(a, b)
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.lattice.join(a, b)
    }

    #[inline]
    pub fn meet_of(&self, a: Elem, b: Elem) -> Elem {
        self.lattice.meet(a, b)
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn is_completely_distributive(&self) -> bool {
        self.completely_distributive
    }

    /// True when the tensor is the lattice meet.
    pub fn is_meet(&self) -> bool {
        self.star == meet_table(&self.lattice)
    }

    pub fn well_below(&self, a: Elem, b: Elem) -> bool {
        self.well_below.holds(a, b)
    }

    pub fn well_above(&self, a: Elem, b: Elem) -> bool {
        self.well_above.holds(a, b)
    }

    /// All pairs `(α, ω)` with `α ◁ ⊤` and `⊥ ≺ ω`.
    pub fn support_tests(&self) -> &[SupportTest] {
        &self.tests
    }

    /// The support tests not implied by another one. Passing these with some
    /// witness passes every support test with the same witness.
    pub fn strongest_tests(&self) -> &[SupportTest] {
        &self.strongest_tests
    }

    /// `e ∗ α ≤ d ∨ ω` for the `i`-th strongest test.
    #[inline]
    pub(crate) fn within(&self, test: usize, e: Elem, d: Elem) -> bool {
        self.within[test][e.index() * self.lattice.len() + d.index()]
    }
}

fn meet_table(lattice: &Lattice) -> Vec<Elem> {
    lattice
        .elements()
        .flat_map(|a| lattice.elements().map(move |b| lattice.meet(a, b)))
        .collect()
}

fn associativity_failure(lattice: &Lattice, star: &[Elem]) -> Option<(Elem, Elem, Elem)> {
    let n = lattice.len();
    let get = |a: Elem, b: Elem| star[a.index() * n + b.index()];
    for a in lattice.elements() {
        for b in lattice.elements() {
            for c in lattice.elements() {
                if get(get(a, b), c) != get(a, get(b, c)) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// First subset `S` (in bitmask order, starting with `∅`) and `β` where a
/// distributive law fails.
fn distributivity_failure(lattice: &Lattice, star: &[Elem]) -> Option<(Side, u32, Elem)> {
    let n = lattice.len();
    let get = |a: Elem, b: Elem| star[a.index() * n + b.index()];
    for mask in 0u32..(1u32 << n) {
        let members: Vec<Elem> = lattice
            .elements()
            .filter(|e| mask & (1 << e.index()) != 0)
            .collect();
        let sup = lattice.join_all(members.iter().copied());
        for beta in lattice.elements() {
            if get(sup, beta) != lattice.join_all(members.iter().map(|&s| get(s, beta))) {
                return Some((Side::Left, mask, beta));
            }
            if get(beta, sup) != lattice.join_all(members.iter().map(|&s| get(beta, s))) {
                return Some((Side::Right, mask, beta));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_meet_quantale() {
        let q = Quantale::meet(Lattice::chain_of(2)).unwrap();
        assert!(q.is_commutative());
        assert!(q.is_integral());
        assert!(q.is_completely_distributive());
    }

    #[test]
    fn fifths_chain_with_min() {
        let l = Lattice::chain(&["0", "1/5", "1/4", "1/3", "1/2", "1"]).unwrap();
        let q = Quantale::meet(l).unwrap();
        assert!(q.is_commutative() && q.is_integral());
    }

    #[test]
    fn m3_meet_is_rejected() {
        let err = Quantale::meet(Lattice::m3()).unwrap_err();
        match err {
            QuantaleError::NotJoinDistributive { subset, beta, .. } => {
                // a ∧ (b ∨ c) = a but (a ∧ b) ∨ (a ∧ c) = ⊥, or a symmetric instance
                assert_eq!(subset.len(), 2);
                assert!(!subset.contains(&beta));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_associative_table() {
        // 0 < 1 < 2 with 1*1 = 2, 1*2 = 1, 2*1 = 1, 2*2 = 2 is monotone but
        // (1*1)*1 = 2*1 = 1 while 1*(1*1) = 1*2 = 1; pick a failing one instead.
        let l = Lattice::chain_of(3);
        let e = |i: u8| Elem(i);
        // x*y = top for all non-bottom x,y except 2*1 = 1
        let star = vec![
            e(0), e(0), e(0), //
            e(0), e(2), e(2), //
            e(0), e(1), e(2),
        ];
        let err = Quantale::new(l, star).unwrap_err();
        assert!(matches!(err, QuantaleError::NotAssociative { .. }), "{err:?}");
    }

    #[test]
    fn bottom_must_absorb() {
        let l = Lattice::chain_of(2);
        // ⊥ * ⊤ = ⊤ breaks distributivity over the empty join
        let star = vec![Elem(1), Elem(1), Elem(1), Elem(1)];
        let err = Quantale::new(l, star).unwrap_err();
        match err {
            QuantaleError::NotJoinDistributive { subset, .. } => assert!(subset.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_integral_tensor_is_accepted() {
        let l = Lattice::chain_of(2);
        let star = vec![Elem(0); 4];
        let q = Quantale::new(l, star).unwrap();
        assert!(!q.is_integral());
        assert!(q.is_commutative());
    }

    #[test]
    fn chain_tests_reduce_to_one() {
        for n in 2..6 {
            let q = Quantale::meet(Lattice::chain_of(n)).unwrap();
            assert_eq!(
                q.strongest_tests(),
                &[SupportTest {
                    alpha: q.top(),
                    omega: q.bottom()
                }]
            );
        }
    }

    #[test]
    fn diamond_tests() {
        let q = Quantale::meet(Lattice::diamond()).unwrap();
        let l = q.lattice();
        let a = l.elem("a").unwrap();
        let b = l.elem("b").unwrap();
        assert!(!q.well_below(l.top(), l.top()));
        assert!(q.well_below(a, l.top()) && q.well_below(b, l.top()));
        assert!(!q.well_above(l.bottom(), l.bottom()));
        let mut strongest: Vec<(Elem, Elem)> = q.strongest_tests().iter().map(|t| (t.alpha, t.omega)).collect();
        strongest.sort();
        assert_eq!(strongest, vec![(a, a), (a, b), (b, a), (b, b)]);
    }

    #[test]
    fn one_element_quantale_has_no_tests() {
        let q = Quantale::meet(Lattice::chain_of(1)).unwrap();
        assert!(q.support_tests().is_empty());
    }
}
