//! Finite complete lattices given by an order relation.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limits::SizeGuard;

/// An element of a finite lattice, by position in its element list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u8);

impl Elem {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("{0} elements declared; at most 255 are supported")]
    TooLarge(usize),
    #[error("element `{0}` is declared twice")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order is not antisymmetric: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error("`{0}` and `{1}` have no least upper bound")]
    MissingJoin(String, String),
    #[error("`{0}` and `{1}` have no greatest lower bound")]
    MissingMeet(String, String),
}

/// A square boolean relation over lattice elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    #[inline]
    pub fn holds(&self, a: Elem, b: Elem) -> bool {
        self.bits[a.index() * self.n + b.index()]
    }

    fn set(&mut self, a: usize, b: usize, v: bool) {
        self.bits[a * self.n + b] = v;
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

/// A finite lattice. Every finite lattice is complete, so arbitrary joins and
/// meets are folds of the binary tables with `bottom`/`top` as units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    names: Vec<String>,
    leq: Vec<bool>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    bottom: Elem,
    top: Elem,
}

impl Lattice {
    /// Builds a lattice from element ids and order pairs `(a, b)` meaning
    /// `a <= b`. The pairs are closed reflexively and transitively first, so
    /// Hasse-diagram pairs suffice.
    pub fn from_pairs<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Self, LatticeError> {
        let n = elements.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > 255 {
            return Err(LatticeError::TooLarge(n));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.as_ref().to_string(), i).is_some() {
                return Err(LatticeError::DuplicateElement(e.as_ref().to_string()));
            }
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| LatticeError::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| LatticeError::UnknownElement(b.as_ref().to_string()))?;
            leq[ia * n + ib] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        let names: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        Self::from_order(names, leq)
    }

    /// Builds a lattice from a complete (already reflexive and transitive)
    /// order table.
    fn from_order(names: Vec<String>, leq: Vec<bool>) -> Result<Self, LatticeError> {
        let n = names.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(LatticeError::NotAntisymmetric(names[i].clone(), names[j].clone()));
                }
            }
        }
        let le = |a: usize, b: usize| leq[a * n + b];
        let mut join = vec![Elem(0); n * n];
        let mut meet = vec![Elem(0); n * n];
        for a in 0..n {
            for b in 0..n {
                let upper: Vec<usize> = (0..n).filter(|&u| le(a, u) && le(b, u)).collect();
                let least = upper.iter().copied().find(|&u| upper.iter().all(|&v| le(u, v)));
                match least {
                    Some(u) => join[a * n + b] = Elem(u as u8),
                    None => return Err(LatticeError::MissingJoin(names[a].clone(), names[b].clone())),
                }
                let lower: Vec<usize> = (0..n).filter(|&l| le(l, a) && le(l, b)).collect();
                let greatest = lower.iter().copied().find(|&l| lower.iter().all(|&v| le(v, l)));
                match greatest {
                    Some(l) => meet[a * n + b] = Elem(l as u8),
                    None => return Err(LatticeError::MissingMeet(names[a].clone(), names[b].clone())),
                }
            }
        }
        let mut bottom = Elem(0);
        let mut top = Elem(0);
        for i in 1..n {
            bottom = meet[bottom.index() * n + i];
            top = join[top.index() * n + i];
        }
        Ok(Lattice {
            names,
            leq,
            join,
            meet,
            bottom,
            top,
        })
    }

    /// The chain `names[0] < names[1] < ...`.
    pub fn chain<S: AsRef<str>>(names: &[S]) -> Result<Self, LatticeError> {
        let pairs: Vec<(&str, &str)> = names
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let names: Vec<&str> = names.iter().map(|s| s.as_ref()).collect();
        Self::from_pairs(&names, &pairs)
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain_of(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::chain(&names).expect("a chain is a lattice")
    }

    /// The four-element Boolean lattice `bot < a, b < top`.
    pub fn diamond() -> Self {
        Self::from_pairs(
            &["bot", "a", "b", "top"],
            &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")],
        )
        .expect("the diamond is a lattice")
    }

    /// The five-element modular, non-distributive lattice with atoms `a`, `b`, `c`.
    pub fn m3() -> Self {
        Self::from_pairs(
            &["bot", "a", "b", "c", "top"],
            &[
                ("bot", "a"),
                ("bot", "b"),
                ("bot", "c"),
                ("a", "top"),
                ("b", "top"),
                ("c", "top"),
            ],
        )
        .expect("M3 is a lattice")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e.index()]
    }

    pub fn elem(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| Elem(i as u8))
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + '_ {
        (0..self.names.len()).map(|i| Elem(i as u8))
    }

    #[inline]
    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> Elem {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.names.len() + b.index()]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a.index() * self.names.len() + b.index()]
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a.index() * self.names.len() + b.index()]
    }

    /// Least upper bound; the empty join is `bottom`.
    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(self.bottom, |acc, e| self.join(acc, e))
    }

    /// Greatest lower bound; the empty meet is `top`.
    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(self.top, |acc, e| self.meet(acc, e))
    }

    /// Join of the subset encoded as a bitmask over element indices.
    pub fn join_mask(&self, mask: u32) -> Elem {
        self.join_all(self.mask_elems(mask))
    }

    pub fn meet_mask(&self, mask: u32) -> Elem {
        self.meet_all(self.mask_elems(mask))
    }

    fn mask_elems(&self, mask: u32) -> impl Iterator<Item = Elem> + '_ {
        self.elements().filter(move |e| mask & (1 << e.index()) != 0)
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.leq(a, b) || self.leq(b, a)))
    }

    /// Binary distributivity of meet over join. For a finite lattice this is
    /// the same as meet distributing over every finite join.
    pub fn is_distributive(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                self.elements().all(|c| {
                    self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c))
                })
            })
        })
    }

    /// Covering pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if a != b && self.leq(a, b) {
                    let between = self
                        .elements()
                        .any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b));
                    if !between {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    fn guard(&self, bound: usize) -> Result<(), SizeGuard> {
        // subsets are u32 bitmasks
        SizeGuard::check(
            "subset sweep over lattice elements",
            self.len() as u128,
            bound.min(30) as u128,
        )
    }

    /// `alpha ◁ beta`: every subset whose join is above `beta` has a member
    /// above `alpha`. Decided by sweeping all 2^|L| subsets.
    pub fn well_below(&self, alpha: Elem, beta: Elem, bound: usize) -> Result<bool, SizeGuard> {
        self.guard(bound)?;
        let n = self.len();
        for mask in 0u32..(1u32 << n) {
            if self.leq(beta, self.join_mask(mask))
                && !self.mask_elems(mask).any(|d| self.leq(alpha, d))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `alpha ≺ beta`: every subset whose meet is below `alpha` has a member
    /// below `beta`.
    pub fn well_above(&self, alpha: Elem, beta: Elem, bound: usize) -> Result<bool, SizeGuard> {
        self.guard(bound)?;
        let n = self.len();
        for mask in 0u32..(1u32 << n) {
            if self.leq(self.meet_mask(mask), alpha)
                && !self.mask_elems(mask).any(|d| self.leq(d, beta))
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The full `◁` table from a single subset sweep.
    pub fn well_below_relation(&self, bound: usize) -> Result<Relation, SizeGuard> {
        self.guard(bound)?;
        let n = self.len();
        let mut rel = Relation::empty(n);
        rel.bits.iter_mut().for_each(|b| *b = true);
        for mask in 0u32..(1u32 << n) {
            let j = self.join_mask(mask);
            // elements below some member of the subset
            let mut below = 0u32;
            for d in self.mask_elems(mask) {
                for a in self.elements() {
                    if self.leq(a, d) {
                        below |= 1 << a.index();
                    }
                }
            }
            for beta in self.elements().filter(|&b| self.leq(b, j)) {
                for a in 0..n {
                    if below & (1 << a) == 0 {
                        rel.set(a, beta.index(), false);
                    }
                }
            }
        }
        Ok(rel)
    }

    /// The full `≺` table from a single subset sweep.
    pub fn well_above_relation(&self, bound: usize) -> Result<Relation, SizeGuard> {
        self.guard(bound)?;
        let n = self.len();
        let mut rel = Relation::empty(n);
        rel.bits.iter_mut().for_each(|b| *b = true);
        for mask in 0u32..(1u32 << n) {
            let m = self.meet_mask(mask);
            // betas above some member of the subset
            let mut reached = 0u32;
            for d in self.mask_elems(mask) {
                for b in self.elements() {
                    if self.leq(d, b) {
                        reached |= 1 << b.index();
                    }
                }
            }
            for alpha in self.elements().filter(|&a| self.leq(m, a)) {
                for b in 0..n {
                    if reached & (1 << b) == 0 {
                        rel.set(alpha.index(), b, false);
                    }
                }
            }
        }
        Ok(rel)
    }

    /// Every element is the join of the elements well below it.
    pub fn is_completely_distributive(&self, bound: usize) -> Result<bool, SizeGuard> {
        let wb = self.well_below_relation(bound)?;
        Ok(self.completely_distributive_with(&wb))
    }

    pub(crate) fn completely_distributive_with(&self, wb: &Relation) -> bool {
        self.elements()
            .all(|a| self.join_all(self.elements().filter(|&b| wb.holds(b, a))) == a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(l: &Lattice, name: &str) -> Elem {
        l.elem(name).unwrap()
    }

    #[test]
    fn two_chain() {
        let l = Lattice::from_pairs(&["0", "1"], &[("0", "1")]).unwrap();
        assert_eq!(l.bottom(), e(&l, "0"));
        assert_eq!(l.top(), e(&l, "1"));
        assert_eq!(l.join_all([e(&l, "0"), e(&l, "1")]), e(&l, "1"));
    }

    #[test]
    fn diamond_join_meet() {
        let l = Lattice::diamond();
        assert_eq!(l.join(e(&l, "a"), e(&l, "b")), l.top());
        assert_eq!(l.meet(e(&l, "a"), e(&l, "b")), l.bottom());
        assert!(l.is_distributive());
    }

    #[test]
    fn missing_join_is_reported() {
        let err = Lattice::from_pairs(&["bot", "a", "b"], &[("bot", "a"), ("bot", "b")]).unwrap_err();
        assert_eq!(err, LatticeError::MissingJoin("a".into(), "b".into()));
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            Lattice::from_pairs(&["a", "a"], &[]).unwrap_err(),
            LatticeError::DuplicateElement("a".into())
        );
        assert_eq!(
            Lattice::from_pairs(&["a"], &[("a", "z")]).unwrap_err(),
            LatticeError::UnknownElement("z".into())
        );
        assert_eq!(
            Lattice::from_pairs(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err(),
            LatticeError::NotAntisymmetric("a".into(), "b".into())
        );
        assert_eq!(Lattice::from_pairs::<&str>(&[], &[]).unwrap_err(), LatticeError::Empty);
    }

    #[test]
    fn transitive_closure_is_applied() {
        let l = Lattice::from_pairs(&["x", "y", "z"], &[("x", "y"), ("y", "z")]).unwrap();
        assert!(l.leq(e(&l, "x"), e(&l, "z")));
        assert!(l.is_chain());
    }

    #[test]
    fn empty_join_and_meet() {
        let l = Lattice::diamond();
        assert_eq!(l.join_all([]), l.bottom());
        assert_eq!(l.meet_all([]), l.top());
    }

    #[test]
    fn well_below_examples() {
        let c = Lattice::chain_of(2);
        assert!(c.well_below(c.bottom(), c.top(), 16).unwrap());
        for l in [Lattice::chain_of(3), Lattice::diamond(), Lattice::m3()] {
            for a in l.elements() {
                assert!(!l.well_below(a, l.bottom(), 16).unwrap());
            }
        }
        let m3 = Lattice::m3();
        assert!(!m3.well_below(e(&m3, "a"), m3.top(), 16).unwrap());
    }

    #[test]
    fn complete_distributivity() {
        for n in 1..6 {
            assert!(Lattice::chain_of(n).is_completely_distributive(16).unwrap());
        }
        assert!(Lattice::diamond().is_completely_distributive(16).unwrap());
        assert!(!Lattice::m3().is_completely_distributive(16).unwrap());
    }

    #[test]
    fn tables_agree_with_single_queries() {
        for l in [Lattice::chain_of(4), Lattice::diamond(), Lattice::m3()] {
            let wb = l.well_below_relation(16).unwrap();
            let wa = l.well_above_relation(16).unwrap();
            for a in l.elements() {
                for b in l.elements() {
                    assert_eq!(wb.holds(a, b), l.well_below(a, b, 16).unwrap());
                    assert_eq!(wa.holds(a, b), l.well_above(a, b, 16).unwrap());
                }
            }
        }
    }

    #[test]
    fn size_guard() {
        let l = Lattice::chain_of(17);
        assert!(l.well_below(l.bottom(), l.top(), 16).is_err());
        assert!(l.well_below_relation(17).is_ok());
    }

    #[test]
    fn covers_of_diamond() {
        let l = Lattice::diamond();
        assert_eq!(l.covers().len(), 4);
    }
}
