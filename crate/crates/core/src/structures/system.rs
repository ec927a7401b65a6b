use std::collections::HashSet;
use std::sync::Arc;

use crate::limits::{power, Limits, SizeGuard};
use crate::quantale::{Elem, Quantale};

use super::{Carrier, StructureError};

/// A function `X → L`.
pub type LFunction = Vec<Elem>;

pub fn function_leq(q: &Quantale, f: &[Elem], g: &[Elem]) -> bool {
    f.iter().zip(g).all(|(&a, &b)| q.leq(a, b))
}

pub fn function_meet(q: &Quantale, f: &[Elem], g: &[Elem]) -> LFunction {
    f.iter().zip(g).map(|(&a, &b)| q.meet_of(a, b)).collect()
}

/// `φ` is supported by `family`: for every support test `(α, ω)` some
/// `ψ ∈ family` has `ψ ∗ α ≤ φ ∨ ω` pointwise.
pub fn supported(q: &Quantale, phi: &[Elem], family: &[LFunction]) -> bool {
    (0..q.strongest_tests().len()).all(|t| {
        family
            .iter()
            .any(|psi| psi.iter().zip(phi).all(|(&p, &f)| q.within(t, p, f)))
    })
}

/// Every function `X → L`, in lexicographic order with the first point most
/// significant.
pub fn enumerate_functions(q: &Quantale, n: usize, limits: &Limits) -> Result<Vec<LFunction>, SizeGuard> {
    let total = power(q.len(), n);
    SizeGuard::check("functions X -> L", total, limits.function_candidates as u128)?;
    let mut out = Vec::with_capacity(total as usize);
    let mut f = vec![Elem(0); n];
    loop {
        out.push(f.clone());
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if f[i].index() + 1 < q.len() {
                f[i] = Elem(f[i].0 + 1);
                break;
            }
            f[i] = Elem(0);
        }
    }
}

/// Per-point filter bases `B(x)`; the system `A(x)` is their saturation,
/// decided by [`ApproachSystemBase::contains`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproachSystemBase {
    quantale: Arc<Quantale>,
    carrier: Carrier,
    bases: Vec<Vec<LFunction>>,
}

impl ApproachSystemBase {
    /// Validates shape, the filter-base property, `φ(x) = ⊤` and the mixing
    /// axiom. Duplicate functions within a `B(x)` are dropped.
    pub fn new(quantale: Arc<Quantale>, carrier: Carrier, bases: Vec<Vec<LFunction>>) -> Result<Self, StructureError> {
        let base = Self::unmixed(quantale, carrier, bases)?;
        base.check_mixing()?;
        Ok(base)
    }

    /// Validates everything except the mixing axiom.
    pub(crate) fn unmixed(
        quantale: Arc<Quantale>,
        carrier: Carrier,
        bases: Vec<Vec<LFunction>>,
    ) -> Result<Self, StructureError> {
        let n = carrier.len();
        if bases.len() != n {
            return Err(StructureError::TableShape {
                expected: n,
                found: bases.len(),
            });
        }
        let q = &quantale;
        let mut cleaned = Vec::with_capacity(n);
        for (x, family) in bases.into_iter().enumerate() {
            let px = carrier.name(x).to_string();
            if family.is_empty() {
                return Err(StructureError::EmptySystemBase(px));
            }
            let mut seen = HashSet::new();
            let mut kept = Vec::with_capacity(family.len());
            for phi in family {
                if phi.len() != n {
                    return Err(StructureError::TableShape {
                        expected: n,
                        found: phi.len(),
                    });
                }
                if phi[x] != q.top() {
                    return Err(StructureError::NotTopAtPoint(px, render(q, &carrier, &phi)));
                }
                if seen.insert(phi.clone()) {
                    kept.push(phi);
                }
            }
            for (i, f) in kept.iter().enumerate() {
                for g in &kept[i + 1..] {
                    let m = function_meet(q, f, g);
                    if !kept.iter().any(|h| function_leq(q, h, &m)) {
                        return Err(StructureError::NotFilterBase(
                            px,
                            render(q, &carrier, f),
                            render(q, &carrier, g),
                        ));
                    }
                }
            }
            cleaned.push(kept);
        }
        Ok(ApproachSystemBase {
            quantale,
            carrier,
            bases: cleaned,
        })
    }

    /// `B(x) = {φ_x}` with `φ_x(y) = ⊤` iff `y = x`.
    pub fn discrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let n = carrier.len();
        let bases = (0..n)
            .map(|x| {
                vec![(0..n)
                    .map(|y| if y == x { quantale.top() } else { quantale.bottom() })
                    .collect()]
            })
            .collect();
        ApproachSystemBase {
            quantale,
            carrier,
            bases,
        }
    }

    /// `B(x) = {constant ⊤}`.
    pub fn indiscrete(quantale: Arc<Quantale>, carrier: Carrier) -> Self {
        let n = carrier.len();
        let bases = (0..n).map(|_| vec![vec![quantale.top(); n]]).collect();
        ApproachSystemBase {
            quantale,
            carrier,
            bases,
        }
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.quantale
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn base(&self, x: usize) -> &[LFunction] {
        &self.bases[x]
    }

    pub fn bases(&self) -> &[Vec<LFunction>] {
        &self.bases
    }

    /// Membership of `φ` in `A(x)`.
    pub fn contains(&self, x: usize, phi: &[Elem]) -> bool {
        supported(&self.quantale, phi, &self.bases[x])
    }

    /// All of `A(x)`.
    pub fn saturation(&self, x: usize, limits: &Limits) -> Result<Vec<LFunction>, SizeGuard> {
        Ok(enumerate_functions(&self.quantale, self.carrier.len(), limits)?
            .into_iter()
            .filter(|phi| self.contains(x, phi))
            .collect())
    }

    /// For `φ ∈ B(x)` and a test `(α, ω)` a family `(φ_z) ∈ ∏ B(z)` must give
    /// `φ_x(z) ∗ φ_z(y) ∗ α ≤ φ(y) ∨ ω`. Once `φ_x` is fixed the remaining
    /// choices are independent per `z`, which keeps the search linear.
    fn check_mixing(&self) -> Result<(), StructureError> {
        let q = &self.quantale;
        let n = self.carrier.len();
        for x in 0..n {
            for phi in &self.bases[x] {
                for (t, test) in q.strongest_tests().iter().enumerate() {
                    let holds = self.bases[x].iter().any(|phi_x| {
                        (0..n).all(|z| {
                            let pick = |psi: &LFunction| (0..n).all(|y| q.within(t, q.star(phi_x[z], psi[y]), phi[y]));
                            if z == x {
                                pick(phi_x)
                            } else {
                                self.bases[z].iter().any(pick)
                            }
                        })
                    });
                    if !holds {
                        return Err(StructureError::MixingFails(
                            self.carrier.name(x).to_string(),
                            render(q, &self.carrier, phi),
                            q.lattice().name(test.alpha).to_string(),
                            q.lattice().name(test.omega).to_string(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `a=v b=w ...`
pub fn render(q: &Quantale, carrier: &Carrier, phi: &[Elem]) -> String {
    phi.iter()
        .enumerate()
        .map(|(y, &v)| format!("{}={}", carrier.name(y), q.lattice().name(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Lattice;

    fn q2() -> Arc<Quantale> {
        Arc::new(Quantale::meet(Lattice::chain_of(2)).unwrap())
    }

    /// Mixing by trying every selector family in `∏ B(z)` and every test pair.
    fn mixing_by_products(q: &Quantale, bases: &[Vec<LFunction>]) -> bool {
        let n = bases.len();
        let families: Vec<Vec<usize>> = {
            let mut acc = vec![vec![]];
            for b in bases {
                acc = acc
                    .into_iter()
                    .flat_map(|pre: Vec<usize>| {
                        (0..b.len()).map(move |i| {
                            let mut v = pre.clone();
                            v.push(i);
                            v
                        })
                    })
                    .collect();
            }
            acc
        };
        (0..n).all(|x| {
            bases[x].iter().all(|phi| {
                q.support_tests().iter().all(|t| {
                    families.iter().any(|fam| {
                        let phi_x = &bases[x][fam[x]];
                        (0..n).all(|z| {
                            let phi_z = &bases[z][fam[z]];
                            (0..n).all(|y| {
                                q.leq(
                                    q.star(q.star(phi_x[z], phi_z[y]), t.alpha),
                                    q.join(phi[y], t.omega),
                                )
                            })
                        })
                    })
                })
            })
        })
    }

    #[test]
    fn discrete_and_indiscrete_validate() {
        let c = Carrier::new(&["a", "b", "c"]).unwrap();
        let d = ApproachSystemBase::discrete(q2(), c.clone());
        assert!(ApproachSystemBase::new(q2(), c.clone(), d.bases().to_vec()).is_ok());
        let i = ApproachSystemBase::indiscrete(q2(), c.clone());
        assert!(ApproachSystemBase::new(q2(), c, i.bases().to_vec()).is_ok());
    }

    #[test]
    fn not_top_at_point() {
        let q = q2();
        let c = Carrier::new(&["a", "b"]).unwrap();
        let (t, b) = (q.top(), q.bottom());
        let err = ApproachSystemBase::new(q.clone(), c, vec![vec![vec![b, t]], vec![vec![t, t]]]).unwrap_err();
        assert_eq!(err, StructureError::NotTopAtPoint("a".into(), "a=0 b=1".into()));
    }

    #[test]
    fn not_filter_base() {
        let q = q2();
        let c = Carrier::new(&["a", "b", "c"]).unwrap();
        let (t, b) = (q.top(), q.bottom());
        let bases = vec![vec![vec![t, t, b], vec![t, b, t]], vec![vec![t; 3]], vec![vec![t; 3]]];
        let err = ApproachSystemBase::new(q, c, bases).unwrap_err();
        assert!(matches!(err, StructureError::NotFilterBase(..)), "{err:?}");
    }

    #[test]
    fn mixing_failure() {
        // b is ⊤-close to a, a is ⊤-close to nothing else, but B(b) claims c
        // is ⊤-close while a is not: b→a→c ⊤ forces b→c.
        let q = q2();
        let c = Carrier::new(&["a", "b", "c"]).unwrap();
        let (t, b) = (q.top(), q.bottom());
        let bases = vec![vec![vec![t, b, t]], vec![vec![t, t, b]], vec![vec![b, b, t]]];
        let err = ApproachSystemBase::new(q, c, bases).unwrap_err();
        assert!(matches!(err, StructureError::MixingFails(..)), "{err:?}");
    }

    #[test]
    fn discrete_base_excludes_constant_bottom() {
        let c = Carrier::new(&["a", "b"]).unwrap();
        let q = q2();
        let d = ApproachSystemBase::discrete(q.clone(), c);
        assert!(!d.contains(0, &[q.bottom(), q.bottom()]));
        assert!(d.contains(0, &[q.top(), q.bottom()]));
    }

    #[test]
    fn mixing_agrees_with_product_search() {
        // Every family of one or two functions per point on a 2-point carrier
        // over small quantales.
        let quantales = [
            Quantale::meet(Lattice::chain_of(2)).unwrap(),
            Quantale::meet(Lattice::chain_of(3)).unwrap(),
            Quantale::meet(Lattice::diamond()).unwrap(),
            Quantale::new(Lattice::chain_of(3), {
                // Łukasiewicz on three elements
                let l = |a: u8, b: u8| Elem((a + b).saturating_sub(2));
                (0..3).flat_map(|a| (0..3).map(move |b| l(a, b))).collect()
            })
            .unwrap(),
        ];
        let c = Carrier::new(&["a", "b"]).unwrap();
        for q in quantales {
            let q = Arc::new(q);
            let fns = enumerate_functions(&q, 2, &Limits::default()).unwrap();
            let at = |x: usize| -> Vec<Vec<LFunction>> {
                let own: Vec<&LFunction> = fns.iter().filter(|f| f[x] == q.top()).collect();
                let mut out: Vec<Vec<LFunction>> = own.iter().map(|f| vec![(*f).clone()]).collect();
                for (i, f) in own.iter().enumerate() {
                    for g in &own[i + 1..] {
                        out.push(vec![(*f).clone(), (*g).clone()]);
                    }
                }
                out
            };
            for ba in at(0) {
                for bb in at(1) {
                    let bases = vec![ba.clone(), bb.clone()];
                    let Ok(unmixed) = ApproachSystemBase::unmixed(q.clone(), c.clone(), bases.clone()) else {
                        continue;
                    };
                    let fast = unmixed.check_mixing().is_ok();
                    assert_eq!(fast, mixing_by_products(&q, &bases), "{bases:?}");
                }
            }
        }
    }

    #[test]
    fn function_enumeration_order() {
        let q = q2();
        let fns = enumerate_functions(&q, 2, &Limits::default()).unwrap();
        assert_eq!(
            fns,
            vec![
                vec![Elem(0), Elem(0)],
                vec![Elem(0), Elem(1)],
                vec![Elem(1), Elem(0)],
                vec![Elem(1), Elem(1)]
            ]
        );
    }
}
