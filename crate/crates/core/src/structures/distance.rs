use std::sync::Arc;

use crate::limits::{Limits, SizeGuard};
use crate::quantale::{Elem, Quantale};

use super::{Carrier, LMetric, PointSet, StructureError};

/// A point-to-set table `δ(x, A)`, indexed by point and subset bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproachDistance {
    quantale: Arc<Quantale>,
    carrier: Carrier,
    values: Vec<Elem>,
}

fn guard(carrier: &Carrier, limits: &Limits) -> Result<(), SizeGuard> {
    SizeGuard::check(
        "distance table over all subsets",
        carrier.len() as u128,
        limits.distance_points.min(24) as u128,
    )
}

impl ApproachDistance {
    /// Validates a full table with `values[x * 2^n + A]`.
    pub fn new(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        values: Vec<Elem>,
        limits: &Limits,
    ) -> Result<Self, StructureError> {
        guard(&carrier, limits)?;
        let expected = carrier.len() << carrier.len();
        if values.len() != expected {
            return Err(StructureError::TableShape {
                expected,
                found: values.len(),
            });
        }
        let delta = ApproachDistance {
            quantale,
            carrier,
            values,
        };
        delta.check_axioms()?;
        Ok(delta)
    }

    /// Completes a partial table and validates it. Listed entries win; an
    /// unlisted `δ(x, ∅)` is `⊥`, an unlisted `δ(x, {x})` is `⊤`, and any other
    /// unlisted set takes the join of its singletons. An unlisted off-diagonal
    /// singleton is an error.
    pub fn complete(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        partial: &[Option<Elem>],
        limits: &Limits,
    ) -> Result<Self, StructureError> {
        guard(&carrier, limits)?;
        let n = carrier.len();
        let width = 1usize << n;
        if partial.len() != n * width {
            return Err(StructureError::TableShape {
                expected: n * width,
                found: partial.len(),
            });
        }
        let mut values = Vec::with_capacity(n * width);
        for x in 0..n {
            let row = &partial[x * width..(x + 1) * width];
            let mut singles = Vec::with_capacity(n);
            for y in 0..n {
                match row[1 << y] {
                    Some(v) => singles.push(v),
                    None if y == x => singles.push(quantale.top()),
                    None => {
                        return Err(StructureError::MissingSingleton(
                            carrier.name(x).to_string(),
                            carrier.name(y).to_string(),
                        ))
                    }
                }
            }
            for a in PointSet::all(n) {
                let v = row[a.0 as usize]
                    .unwrap_or_else(|| quantale.lattice().join_all(a.iter().map(|y| singles[y])));
                values.push(v);
            }
        }
        Self::new(quantale, carrier, values, limits)
    }

    /// Built from singleton values `δ(x, {y}) = d(x, y)` by the union rule.
    pub fn from_singletons(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        singles: &LMetric,
        limits: &Limits,
    ) -> Result<Self, StructureError> {
        let n = carrier.len();
        let mut partial = vec![None; n << n];
        for x in 0..n {
            for y in 0..n {
                partial[(x << n) + (1 << y)] = Some(singles.get(x, y));
            }
        }
        Self::complete(quantale, carrier, &partial, limits)
    }

    /// `δ(x, A) = ⊤` if `x ∈ A`, else `⊥`.
    pub fn discrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let n = carrier.len();
        let values = (0..n)
            .flat_map(|x| PointSet::all(n).map(move |a| a.contains(x)))
            .map(|inside| if inside { quantale.top() } else { quantale.bottom() })
            .collect();
        ApproachDistance {
            quantale,
            carrier,
            values,
        }
    }

    /// `δ(x, A) = ⊤` for every non-empty `A`.
    pub fn indiscrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let n = carrier.len();
        let values = (0..n)
            .flat_map(|_| PointSet::all(n))
            .map(|a| if a.is_empty() { quantale.bottom() } else { quantale.top() })
            .collect();
        ApproachDistance {
            quantale,
            carrier,
            values,
        }
    }

    /// Wraps a table produced by a transition and checks it.
    pub(crate) fn checked(quantale: Arc<Quantale>, carrier: Carrier, values: Vec<Elem>) -> Result<Self, StructureError> {
        let delta = ApproachDistance {
            quantale,
            carrier,
            values,
        };
        delta.check_axioms()?;
        Ok(delta)
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, a: PointSet) -> Elem {
        self.values[(x << self.carrier.len()) + a.0 as usize]
    }

    /// `δ(x, {y})` as a table; an L-metric by the tower axiom.
    pub fn singleton_table(&self) -> LMetric {
        LMetric::from_fn(self.carrier.len(), |x, y| self.get(x, PointSet::singleton(y)))
    }

    /// `{x : δ(x, A) ≥ α}`.
    pub fn alpha_closure(&self, a: PointSet, alpha: Elem) -> PointSet {
        (0..self.carrier.len())
            .filter(|&x| self.quantale.leq(alpha, self.get(x, a)))
            .collect()
    }

    pub fn check_axioms(&self) -> Result<(), StructureError> {
        let q = &self.quantale;
        let n = self.carrier.len();
        let name = |x: usize| self.carrier.name(x).to_string();
        for x in 0..n {
            if self.get(x, PointSet::singleton(x)) != q.top() {
                return Err(StructureError::AxiomPoint(name(x)));
            }
            if self.get(x, PointSet::EMPTY) != q.bottom() {
                return Err(StructureError::AxiomEmpty(name(x)));
            }
        }
        // Splitting off the lowest member reaches every set from smaller
        // ones, so these splits imply the union law for all pairs.
        for x in 0..n {
            for a in PointSet::all(n).filter(|a| a.len() >= 2) {
                let low = PointSet(a.0 & a.0.wrapping_neg());
                let rest = PointSet(a.0 & !low.0);
                if self.get(x, a) != q.join(self.get(x, low), self.get(x, rest)) {
                    return Err(StructureError::AxiomUnion(
                        name(x),
                        self.carrier.set_name(low),
                        self.carrier.set_name(rest),
                    ));
                }
            }
        }
        for a in PointSet::all(n) {
            for alpha in q.lattice().elements() {
                let closure = self.alpha_closure(a, alpha);
                for x in 0..n {
                    if !q.leq(q.star(self.get(x, closure), alpha), self.get(x, a)) {
                        return Err(StructureError::AxiomTower(
                            name(x),
                            self.carrier.set_name(a),
                            q.lattice().name(alpha).to_string(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Lattice;

    fn fifths() -> (Arc<Quantale>, Carrier) {
        let l = Lattice::chain(&["0", "1/5", "1/4", "1/3", "1/2", "1"]).unwrap();
        (Arc::new(Quantale::meet(l).unwrap()), Carrier::new(&["a", "b", "c"]).unwrap())
    }

    fn worked_example() -> ApproachDistance {
        let (q, c) = fifths();
        let e = |s: &str| q.lattice().elem(s).unwrap();
        let set = |names: &[&str]| PointSet::from_iter(names.iter().map(|p| c.index_of(p).unwrap()));
        let mut partial = vec![None; 3 << 3];
        let mut put = |x: &str, a: &[&str], v: &str| {
            partial[(c.index_of(x).unwrap() << 3) + set(a).0 as usize] = Some(e(v));
        };
        put("b", &["a"], "0");
        put("c", &["a"], "0");
        put("a", &["b"], "1/2");
        put("a", &["b", "c"], "1/2");
        put("c", &["b"], "1/3");
        put("c", &["a", "b"], "1/3");
        put("a", &["c"], "1/4");
        put("b", &["c"], "1/5");
        put("b", &["a", "c"], "1/5");
        ApproachDistance::complete(q.clone(), c.clone(), &partial, &Limits::default()).unwrap()
    }

    #[test]
    fn worked_example_validates() {
        let d = worked_example();
        let q = d.quantale().clone();
        let e = |s: &str| q.lattice().elem(s).unwrap();
        assert_eq!(d.alpha_closure(PointSet::singleton(0), e("1/2")), PointSet::singleton(0));
        assert_eq!(d.get(0, PointSet(0b110)), e("1/2"));
        assert_eq!(d.get(2, PointSet(0b011)), e("1/3"));
    }

    #[test]
    fn alpha_closure_edges() {
        let d = worked_example();
        let q = d.quantale().clone();
        for a in PointSet::all(3) {
            assert_eq!(d.alpha_closure(a, q.bottom()), PointSet::full(3));
            for alpha in q.lattice().elements() {
                assert!(a.is_subset(d.alpha_closure(a, alpha)));
            }
        }
    }

    #[test]
    fn constant_top_example_validates() {
        let l = Lattice::chain(&["-1", "0", "1", "3"]).unwrap();
        let q = Arc::new(Quantale::meet(l).unwrap());
        let c = Carrier::new(&["x", "y", "z"]).unwrap();
        let d = ApproachDistance::indiscrete(q.clone(), c.clone());
        assert!(ApproachDistance::new(q, c, d.values().to_vec(), &Limits::default()).is_ok());
    }

    #[test]
    fn axiom_failures() {
        let (q, c) = fifths();
        let base = ApproachDistance::discrete(q.clone(), c.clone());
        let mut v = base.values().to_vec();
        v[1] = q.bottom();
        assert_eq!(
            ApproachDistance::new(q.clone(), c.clone(), v, &Limits::default()),
            Err(StructureError::AxiomPoint("a".into()))
        );
        let mut v = base.values().to_vec();
        v[0] = q.top();
        assert_eq!(
            ApproachDistance::new(q.clone(), c.clone(), v, &Limits::default()),
            Err(StructureError::AxiomEmpty("a".into()))
        );
        // δ(a, {a,b}) below δ(a, {a})
        let mut v = base.values().to_vec();
        v[0b011] = q.bottom();
        assert!(matches!(
            ApproachDistance::new(q.clone(), c.clone(), v, &Limits::default()),
            Err(StructureError::AxiomUnion(..))
        ));
        // a ⊤ path a→b→c with δ(a,{c}) = ⊥ breaks the tower law
        let mut partial = vec![None; 3 << 3];
        partial[(0 << 3) + 0b010] = Some(q.top());
        partial[(0 << 3) + 0b100] = Some(q.bottom());
        partial[(1 << 3) + 0b001] = Some(q.bottom());
        partial[(1 << 3) + 0b100] = Some(q.top());
        partial[(2 << 3) + 0b001] = Some(q.bottom());
        partial[(2 << 3) + 0b010] = Some(q.bottom());
        assert!(matches!(
            ApproachDistance::complete(q, c, &partial, &Limits::default()),
            Err(StructureError::AxiomTower(..))
        ));
    }

    #[test]
    fn missing_singleton() {
        let (q, c) = fifths();
        let partial = vec![None; 3 << 3];
        assert_eq!(
            ApproachDistance::complete(q, c, &partial, &Limits::default()),
            Err(StructureError::MissingSingleton("a".into(), "b".into()))
        );
    }

    #[test]
    fn union_split_check_matches_all_pairs() {
        // For every 2-chain table on 2 points with the right diagonal and
        // empty entries, the split check agrees with the literal union law.
        let q = Arc::new(Quantale::meet(Lattice::chain_of(2)).unwrap());
        let c = Carrier::new(&["a", "b"]).unwrap();
        for code in 0u32..16 {
            let mut v = ApproachDistance::discrete(q.clone(), c.clone()).values().to_vec();
            // free cells: δ(a,{b}), δ(a,{a,b}), δ(b,{a}), δ(b,{a,b})
            for (bit, cell) in [2usize, 3, 5, 7].into_iter().enumerate() {
                v[cell] = Elem((code >> bit & 1) as u8);
            }
            let get = |x: usize, a: usize| v[x * 4 + a];
            let literal = (0..2).all(|x| {
                (0..4).all(|a| (0..4).all(|b| get(x, a | b) == q.join(get(x, a), get(x, b))))
            });
            let checked = ApproachDistance::new(q.clone(), c.clone(), v.clone(), &Limits::default());
            let union_ok = !matches!(checked, Err(StructureError::AxiomUnion(..)));
            assert_eq!(union_ok, literal, "{v:?}");
        }
    }
}
