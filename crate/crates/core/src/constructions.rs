//! Products, wedges, the axis and folding maps, and initial lifts of
//! sources.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::limits::{Limits, SizeGuard};
use crate::quantale::Quantale;
use crate::structures::{ApproachSystemBase, Carrier, GaugeBase, LFunction, LMetric, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("basepoint `{0}` is not in the carrier")]
    BasepointMissing(String),
    #[error("expected a wedge of {expected} copies, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("a wedge needs at least two copies")]
    TooFewCopies,
    #[error("map does not fit: {0}")]
    BadMap(String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuard),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A total map between carriers, by image index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    domain: Carrier,
    codomain: Carrier,
    assignment: Vec<usize>,
}

impl PointMap {
    pub fn new(domain: Carrier, codomain: Carrier, assignment: Vec<usize>) -> Result<Self, ConstructionError> {
        if assignment.len() != domain.len() {
            return Err(ConstructionError::BadMap(format!(
                "{} images for {} points",
                assignment.len(),
                domain.len()
            )));
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= codomain.len()) {
            return Err(ConstructionError::BadMap(format!("image {y} outside the codomain")));
        }
        Ok(PointMap {
            domain,
            codomain,
            assignment,
        })
    }

    pub fn identity(carrier: Carrier) -> Self {
        let assignment = (0..carrier.len()).collect();
        PointMap {
            domain: carrier.clone(),
            codomain: carrier,
            assignment,
        }
    }

    pub fn constant(domain: Carrier, codomain: Carrier, target: usize) -> Result<Self, ConstructionError> {
        let assignment = vec![target; domain.len()];
        Self::new(domain, codomain, assignment)
    }

    pub fn domain(&self) -> &Carrier {
        &self.domain
    }

    pub fn codomain(&self) -> &Carrier {
        &self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PointMap) -> Result<PointMap, ConstructionError> {
        if self.codomain != next.domain {
            return Err(ConstructionError::BadMap("codomain and domain differ".into()));
        }
        Ok(PointMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            assignment: self.assignment.iter().map(|&y| next.assignment[y]).collect(),
        })
    }
}

/// A finite cartesian product; tuples are indexed with the first factor most
/// significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    carrier: Carrier,
    factors: Vec<Carrier>,
}

impl Product {
    pub fn new(factors: &[&Carrier], limits: &Limits) -> Result<Self, ConstructionError> {
        let mut size: u128 = 1;
        for f in factors {
            size = size.saturating_mul(f.len() as u128);
        }
        SizeGuard::check("product carrier points", size, limits.product_points as u128)?;
        let mut names = vec![String::new()];
        for (k, f) in factors.iter().enumerate() {
            names = names
                .iter()
                .flat_map(|pre| {
                    f.points().iter().map(move |p| {
                        if k == 0 {
                            p.clone()
                        } else {
                            format!("{pre},{p}")
                        }
                    })
                })
                .collect();
        }
        let names: Vec<String> = names.into_iter().map(|s| format!("({s})")).collect();
        Ok(Product {
            carrier: Carrier::new(&names)?,
            factors: factors.iter().map(|c| (*c).clone()).collect(),
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn factors(&self) -> &[Carrier] {
        &self.factors
    }

    /// Index of a tuple of factor indices.
    pub fn tuple(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&c, f)| acc * f.len() + c)
    }

    pub fn coords(&self, mut t: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = t % f.len();
            t /= f.len();
        }
        out
    }

    pub fn projection(&self, i: usize) -> PointMap {
        let assignment = (0..self.carrier.len()).map(|t| self.coords(t)[i]).collect();
        PointMap {
            domain: self.carrier.clone(),
            codomain: self.factors[i].clone(),
            assignment,
        }
    }
}

/// The product carrier of `spaces` with the initial gauge base of the
/// projections.
pub fn product_gauge_base(spaces: &[&GaugeBase], limits: &Limits) -> Result<(Product, GaugeBase), ConstructionError> {
    let carriers: Vec<&Carrier> = spaces.iter().map(|g| g.carrier()).collect();
    let product = Product::new(&carriers, limits)?;
    let sources: Vec<(PointMap, &GaugeBase)> = spaces
        .iter()
        .enumerate()
        .map(|(i, g)| (product.projection(i), *g))
        .collect();
    let base = initial_gauge_base(product.carrier(), &sources, limits)?;
    Ok((product, base))
}

/// `n` copies of a carrier glued at a basepoint. The glued point comes
/// first, then copy 1 of the other points in carrier order, then copy 2, and
/// so on; copies are named `x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wedge {
    base: Carrier,
    basepoint: usize,
    copies: usize,
    carrier: Carrier,
}

impl Wedge {
    pub fn new(base: &Carrier, basepoint: &str, copies: usize) -> Result<Self, ConstructionError> {
        let p = base
            .index_of(basepoint)
            .ok_or_else(|| ConstructionError::BasepointMissing(basepoint.to_string()))?;
        Self::at(base, p, copies)
    }

    pub fn at(base: &Carrier, p: usize, copies: usize) -> Result<Self, ConstructionError> {
        if p >= base.len() {
            return Err(ConstructionError::BasepointMissing(p.to_string()));
        }
        if copies < 2 {
            return Err(ConstructionError::TooFewCopies);
        }
        let mut names = vec![base.name(p).to_string()];
        for i in 1..=copies {
            for x in (0..base.len()).filter(|&x| x != p) {
                names.push(format!("{}_{i}", base.name(x)));
            }
        }
        Ok(Wedge {
            base: base.clone(),
            basepoint: p,
            copies,
            carrier: Carrier::new(&names)?,
        })
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn base(&self) -> &Carrier {
        &self.base
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Wedge index of `x` in copy `i` (1-based); the basepoint in every copy
    /// is the glued point.
    pub fn point(&self, x: usize, i: usize) -> usize {
        if x == self.basepoint {
            return 0;
        }
        let per_copy = self.base.len() - 1;
        let offset = if x < self.basepoint { x } else { x - 1 };
        1 + (i - 1) * per_copy + offset
    }

    /// `(x, Some(i))` for a copy point, `(p, None)` for the glued point.
    pub fn origin(&self, w: usize) -> (usize, Option<usize>) {
        if w == 0 {
            return (self.basepoint, None);
        }
        let per_copy = self.base.len() - 1;
        let i = (w - 1) / per_copy + 1;
        let offset = (w - 1) % per_copy;
        let x = if offset < self.basepoint { offset } else { offset + 1 };
        (x, Some(i))
    }

    fn require(&self, copies: usize) -> Result<(), ConstructionError> {
        if self.copies != copies {
            return Err(ConstructionError::ArityMismatch {
                expected: copies,
                found: self.copies,
            });
        }
        Ok(())
    }

    fn map_to_square(&self, image: impl Fn(usize, usize) -> (usize, usize), limits: &Limits) -> Result<(Product, PointMap), ConstructionError> {
        self.require(2)?;
        let product = Product::new(&[&self.base, &self.base], limits)?;
        let p = self.basepoint;
        let assignment = (0..self.carrier.len())
            .map(|w| {
                let (x, i) = self.origin(w);
                let (a, b) = match i {
                    None => (p, p),
                    Some(i) => image(x, i),
                };
                product.tuple(&[a, b])
            })
            .collect();
        let map = PointMap::new(self.carrier.clone(), product.carrier().clone(), assignment)?;
        Ok((product, map))
    }

    /// `x_1 ↦ (x, p)`, `x_2 ↦ (p, x)`.
    pub fn principal_axis_map(&self, limits: &Limits) -> Result<(Product, PointMap), ConstructionError> {
        let p = self.basepoint;
        self.map_to_square(|x, i| if i == 1 { (x, p) } else { (p, x) }, limits)
    }

    /// `x_1 ↦ (x, x)`, `x_2 ↦ (p, x)`.
    pub fn skewed_axis_map(&self, limits: &Limits) -> Result<(Product, PointMap), ConstructionError> {
        let p = self.basepoint;
        self.map_to_square(|x, i| if i == 1 { (x, x) } else { (p, x) }, limits)
    }

    /// `x_i ↦ (p, …, p, x, p, …, p)` with `x` in slot `i`, into the
    /// `copies`-fold power.
    pub fn infinite_axis_map(&self, limits: &Limits) -> Result<(Product, PointMap), ConstructionError> {
        let factors = vec![&self.base; self.copies];
        let product = Product::new(&factors, limits)?;
        let p = self.basepoint;
        let assignment = (0..self.carrier.len())
            .map(|w| {
                let (x, i) = self.origin(w);
                let mut coords = vec![p; self.copies];
                if let Some(i) = i {
                    coords[i - 1] = x;
                }
                product.tuple(&coords)
            })
            .collect();
        let map = PointMap::new(self.carrier.clone(), product.carrier().clone(), assignment)?;
        Ok((product, map))
    }

    /// `x_i ↦ x`, for any number of copies.
    pub fn folding_map(&self) -> PointMap {
        let assignment = (0..self.carrier.len()).map(|w| self.origin(w).0).collect();
        PointMap {
            domain: self.carrier.clone(),
            codomain: self.base.clone(),
            assignment,
        }
    }
}

/// All meets `⋀_{i ∈ K} d_i ∘ (f_i × f_i)` over non-empty `K` and choices
/// `d_i` from the `i`-th base, deduplicated, in generation order.
pub fn initial_gauge_base(
    carrier: &Carrier,
    sources: &[(PointMap, &GaugeBase)],
    limits: &Limits,
) -> Result<GaugeBase, ConstructionError> {
    let Some((_, first)) = sources.first() else {
        return Err(ConstructionError::BadMap("an initial lift needs at least one source".into()));
    };
    let q: Arc<Quantale> = first.quantale().clone();
    for (f, g) in sources {
        if f.domain() != carrier || f.codomain() != g.carrier() {
            return Err(ConstructionError::BadMap("source map does not match its space".into()));
        }
    }
    let n = carrier.len();
    // `None` stands for the empty meet, dropped at the end.
    let mut members: Vec<Option<LMetric>> = vec![None];
    for (f, g) in sources {
        let pulled: Vec<LMetric> = g.metrics().iter().map(|d| d.pullback(f.assignment())).collect();
        let mut seen: HashSet<Option<LMetric>> = members.iter().cloned().collect();
        let mut next = members.clone();
        for m in &members {
            for d in &pulled {
                let meet = match m {
                    None => d.clone(),
                    Some(m) => m.meet(&q, d),
                };
                let item = Some(meet);
                if seen.insert(item.clone()) {
                    next.push(item);
                    SizeGuard::check("initial base members", next.len() as u128, limits.initial_base as u128 + 1)?;
                }
            }
        }
        members = next;
    }
    let metrics: Vec<LMetric> = members.into_iter().flatten().collect();
    debug_assert!(metrics.iter().all(|d| d.size() == n));
    Ok(GaugeBase::without_directedness(q, carrier.clone(), metrics)?)
}

/// `B(x)` = all meets `⋀_{i ∈ K} φ_i ∘ f_i` over non-empty `K` with
/// `φ_i ∈ B_i(f_i(x))`.
pub fn initial_system_base(
    carrier: &Carrier,
    sources: &[(PointMap, &ApproachSystemBase)],
    limits: &Limits,
) -> Result<ApproachSystemBase, ConstructionError> {
    let Some((_, first)) = sources.first() else {
        return Err(ConstructionError::BadMap("an initial lift needs at least one source".into()));
    };
    let q: Arc<Quantale> = first.quantale().clone();
    for (f, b) in sources {
        if f.domain() != carrier || f.codomain() != b.carrier() {
            return Err(ConstructionError::BadMap("source map does not match its space".into()));
        }
    }
    let mut bases = Vec::with_capacity(carrier.len());
    for x in 0..carrier.len() {
        let mut members: Vec<Option<LFunction>> = vec![None];
        for (f, b) in sources {
            let pulled: Vec<LFunction> = b
                .base(f.apply(x))
                .iter()
                .map(|phi| f.assignment().iter().map(|&y| phi[y]).collect())
                .collect();
            let mut seen: HashSet<Option<LFunction>> = members.iter().cloned().collect();
            let mut next = members.clone();
            for m in &members {
                for phi in &pulled {
                    let meet = match m {
                        None => phi.clone(),
                        Some(m) => crate::structures::function_meet(&q, m, phi),
                    };
                    let item = Some(meet);
                    if seen.insert(item.clone()) {
                        next.push(item);
                        SizeGuard::check("initial base members", next.len() as u128, limits.initial_base as u128 + 1)?;
                    }
                }
            }
            members = next;
        }
        bases.push(members.into_iter().flatten().collect());
    }
    Ok(ApproachSystemBase::new(q, carrier.clone(), bases)?)
}

/// The base `{d_dis}`, whose gauge is every L-metric.
pub fn discrete_gauge(quantale: Arc<Quantale>, carrier: Carrier) -> GaugeBase {
    GaugeBase::discrete(quantale, carrier)
}

/// The gauge contains `d_dis`, hence every L-metric.
pub fn is_discrete(g: &GaugeBase) -> bool {
    g.contains(&LMetric::discrete(g.quantale(), g.carrier().len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Lattice;
    use crate::structures::enumerate_metrics;

    fn q3() -> Arc<Quantale> {
        Arc::new(Quantale::meet(Lattice::chain_of(3)).unwrap())
    }

    #[test]
    fn wedge_sizes() {
        for size in 1..=4 {
            let c = Carrier::numbered(size);
            for n in 2..=4 {
                let w = Wedge::at(&c, 0, n).unwrap();
                assert_eq!(w.carrier().len(), n * (size - 1) + 1);
                for v in 0..w.carrier().len() {
                    let (x, i) = w.origin(v);
                    assert_eq!(w.point(x, i.unwrap_or(1)), v);
                }
            }
        }
        let c = Carrier::new(&["a", "p"]).unwrap();
        assert!(matches!(Wedge::new(&c, "q", 2), Err(ConstructionError::BasepointMissing(_))));
        assert!(matches!(Wedge::new(&c, "p", 1), Err(ConstructionError::TooFewCopies)));
    }

    #[test]
    fn axis_maps() {
        let c = Carrier::new(&["a", "p"]).unwrap();
        let w = Wedge::new(&c, "p", 2).unwrap();
        let (prod, a) = w.principal_axis_map(&Limits::default()).unwrap();
        let name = |m: &PointMap, v: usize| prod.carrier().name(m.apply(v)).to_string();
        let a1 = w.carrier().index_of("a_1").unwrap();
        let a2 = w.carrier().index_of("a_2").unwrap();
        let p = w.carrier().index_of("p").unwrap();
        assert_eq!(name(&a, a1), "(a,p)");
        assert_eq!(name(&a, a2), "(p,a)");
        assert_eq!(name(&a, p), "(p,p)");
        let (_, s) = w.skewed_axis_map(&Limits::default()).unwrap();
        assert_eq!(name(&s, a1), "(a,a)");
        assert_eq!(name(&s, a2), "(p,a)");
        assert_eq!(name(&s, p), "(p,p)");
        let fold = w.folding_map();
        assert_eq!(fold.assignment(), &[1, 0, 0]);

        let w3 = Wedge::new(&c, "p", 3).unwrap();
        assert!(matches!(w3.principal_axis_map(&Limits::default()), Err(ConstructionError::ArityMismatch { .. })));
        let (prod3, inf) = w3.infinite_axis_map(&Limits::default()).unwrap();
        let a_2 = w3.carrier().index_of("a_2").unwrap();
        assert_eq!(prod3.carrier().name(inf.apply(a_2)), "(p,a,p)");
        assert_eq!(prod3.carrier().name(inf.apply(0)), "(p,p,p)");
        assert!(w3.folding_map().assignment().iter().skip(1).all(|&x| x == 0));
    }

    #[test]
    fn product_guard() {
        let c = Carrier::numbered(3);
        let limits = Limits::default();
        assert!(Product::new(&[&c, &c, &c], &limits).is_ok());
        assert!(matches!(Product::new(&[&c, &c, &c, &c], &limits), Err(ConstructionError::SizeGuard(_))));
    }

    #[test]
    fn single_identity_source_keeps_the_base() {
        let q = q3();
        let c = Carrier::numbered(2);
        for d in enumerate_metrics(&q, 2, &Limits::default()).unwrap() {
            let g = GaugeBase::new(q.clone(), c.clone(), vec![d], &Limits::default()).unwrap();
            let lifted = initial_gauge_base(&c, &[(PointMap::identity(c.clone()), &g)], &Limits::default()).unwrap();
            assert_eq!(lifted, g);
        }
    }

    #[test]
    fn products_of_discrete_are_discrete() {
        let q = q3();
        let a = GaugeBase::discrete(q.clone(), Carrier::numbered(2));
        let b = GaugeBase::discrete(q.clone(), Carrier::numbered(3));
        let (prod, g) = product_gauge_base(&[&a, &b], &Limits::default()).unwrap();
        assert_eq!(prod.carrier().len(), 6);
        assert!(is_discrete(&g));
        let (_, single) = product_gauge_base(&[&a], &Limits::default()).unwrap();
        assert!(is_discrete(&single));
        assert_eq!(single.metrics(), a.metrics());
    }

    #[test]
    fn discreteness() {
        let q = q3();
        let c = Carrier::numbered(2);
        assert!(is_discrete(&discrete_gauge(q.clone(), c.clone())));
        assert!(!is_discrete(&GaugeBase::indiscrete(q.clone(), c)));
        assert!(is_discrete(&GaugeBase::indiscrete(q, Carrier::numbered(1))));
    }

    #[test]
    fn axis_lift_values_at_the_copy_pair() {
        // The meet of the axis pullback with the folding pullback at
        // (x_1, x_2) is d(x,p) ∧ d(p,x) for the principal map and d(x,p) for
        // the skewed one.
        let q = q3();
        let c = Carrier::new(&["x", "p"]).unwrap();
        let limits = Limits::default();
        for d in enumerate_metrics(&q, 2, &limits).unwrap() {
            let g = GaugeBase::new(q.clone(), c.clone(), vec![d.clone()], &limits).unwrap();
            let w = Wedge::new(&c, "p", 2).unwrap();
            let dis = discrete_gauge(q.clone(), c.clone());
            let (x, p) = (0, 1);
            let (x1, x2) = (w.point(x, 1), w.point(x, 2));
            for (skewed, expected) in [
                (false, q.meet_of(d.get(x, p), d.get(p, x))),
                (true, d.get(x, p)),
            ] {
                let (_, prod) = product_gauge_base(&[&g, &g], &limits).unwrap();
                let (_, axis) = if skewed {
                    w.skewed_axis_map(&limits).unwrap()
                } else {
                    w.principal_axis_map(&limits).unwrap()
                };
                let lifted = initial_gauge_base(w.carrier(), &[(axis, &prod), (w.folding_map(), &dis)], &limits).unwrap();
                let full = lifted
                    .metrics()
                    .iter()
                    .fold(LMetric::indiscrete(&q, w.carrier().len()), |acc, m| acc.meet(&q, m));
                // the meet over everything includes d_dis pulled back, which is ⊤ here
                assert_eq!(full.get(x1, x2), expected);
            }
        }
    }

    #[test]
    fn initial_system_of_discrete_source() {
        let q = q3();
        let c = Carrier::numbered(3);
        let dis = ApproachSystemBase::discrete(q.clone(), c.clone());
        let lifted = initial_system_base(&c, &[(PointMap::identity(c.clone()), &dis)], &Limits::default()).unwrap();
        assert_eq!(lifted, dis);
        let twice = initial_system_base(
            &c,
            &[(PointMap::identity(c.clone()), &dis), (PointMap::identity(c.clone()), &dis)],
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(twice, dis);
    }

    #[test]
    fn map_composition() {
        let c = Carrier::numbered(3);
        let d = Carrier::numbered(2);
        let f = PointMap::new(c.clone(), d.clone(), vec![0, 1, 1]).unwrap();
        let g = PointMap::constant(d.clone(), c.clone(), 2).unwrap();
        assert_eq!(f.then(&g).unwrap().assignment(), &[2, 2, 2]);
        assert!(PointMap::new(c, d, vec![0, 2, 1]).is_err());
    }
}
