//! Local T0, local T1, closed points and D-connectedness.
//!
//! Each property is decided two ways: by value conditions on whichever
//! presentation the space comes in ([`Method::Characterization`]), and by
//! building the defining initial lift or searching for contractions
//! ([`Method::Oracle`]).

use std::sync::OnceLock;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{
    discrete_gauge, initial_gauge_base, is_discrete, product_gauge_base, ConstructionError, PointMap, Wedge,
};
use crate::limits::{power, Limits, SizeGuard};
use crate::quantale::{Elem, Quantale};
use crate::structures::{
    ApproachDistance, ApproachSystemBase, Carrier, GaugeBase, LFunction, LMetric, PointSet,
};
use crate::transitions::{distance_gauge_contains, distance_gauge_members, distance_to_gauge, system_gauge_members,
    system_to_gauge, TransitionError};

/// A space in one of its three presentations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Gauge(GaugeBase),
    Distance(ApproachDistance),
    System(ApproachSystemBase),
}

impl Space {
    pub fn quantale(&self) -> &std::sync::Arc<Quantale> {
        match self {
            Space::Gauge(g) => g.quantale(),
            Space::Distance(d) => d.quantale(),
            Space::System(s) => s.quantale(),
        }
    }

    pub fn carrier(&self) -> &Carrier {
        match self {
            Space::Gauge(g) => g.carrier(),
            Space::Distance(d) => d.carrier(),
            Space::System(s) => s.carrier(),
        }
    }

    pub fn presentation(&self) -> Presentation {
        match self {
            Space::Gauge(_) => Presentation::Gauge,
            Space::Distance(_) => Presentation::Distance,
            Space::System(_) => Presentation::System,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Presentation {
    Gauge,
    Distance,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    T0,
    T1,
    Closed,
    DConnected,
}

impl Axiom {
    pub fn is_local(self) -> bool {
        self != Axiom::DConnected
    }

    pub fn label(self) -> &'static str {
        match self {
            Axiom::T0 => "t0",
            Axiom::T1 => "t1",
            Axiom::Closed => "closed",
            Axiom::DConnected => "d_connected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Characterization,
    Oracle,
}

/// Why a verdict came out the way it did. Points and elements are by name,
/// so evidence can be printed, stored and checked again later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// A gauge member, by rows, with the decisive values at `(x, y)`.
    Metric { x: String, y: String, rows: Vec<Vec<String>> },
    /// A function in `A(at)` and its value at `y`.
    Function { at: String, y: String, phi: Vec<String> },
    /// `δ(x, {y})` and `δ(y, {x})`, or the same infima over the gauge or the
    /// systems.
    Values {
        x: String,
        y: String,
        forward: String,
        backward: String,
    },
    /// No witness exists for this pair.
    Pair { x: String, y: String },
    /// A non-constant contraction onto a discrete space.
    Map { image: Vec<String> },
    /// Size of the constructed initial lift.
    Lift { points: usize, base: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub axiom: Axiom,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    pub holds: bool,
    pub method: Method,
    pub presentation: Presentation,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error(transparent)]
    SizeGuard(#[from] SizeGuard),
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

impl AxiomError {
    pub fn is_size_guard(&self) -> bool {
        matches!(
            self,
            AxiomError::SizeGuard(_)
                | AxiomError::Transition(TransitionError::SizeGuard(_))
                | AxiomError::Construction(ConstructionError::SizeGuard(_))
        )
    }
}

/// Per-point booleans and the D-connected flag for one method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub t0: IndexMap<String, bool>,
    pub t1: IndexMap<String, bool>,
    pub closed: IndexMap<String, bool>,
    pub d_connected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub characterization: Summary,
    /// Absent when some oracle exceeds its budget.
    pub oracle: Option<Summary>,
    pub verdicts: Vec<Verdict>,
}

/// Decides the separation and connectedness properties of one space,
/// caching the enumerations they share.
#[derive(Debug)]
pub struct Analyzer {
    space: Space,
    limits: Limits,
    members: OnceLock<Result<Vec<LMetric>, AxiomError>>,
    saturations: Vec<OnceLock<Result<Vec<LFunction>, AxiomError>>>,
    oracle_gauge: OnceLock<Result<GaugeBase, AxiomError>>,
}

type PairOutcome = Result<Vec<Evidence>, Evidence>;

impl Analyzer {
    pub fn new(space: Space, limits: Limits) -> Self {
        let n = space.carrier().len();
        Analyzer {
            space,
            limits,
            members: OnceLock::new(),
            saturations: (0..n).map(|_| OnceLock::new()).collect(),
            oracle_gauge: OnceLock::new(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    fn q(&self) -> &Quantale {
        self.space.quantale()
    }

    fn n(&self) -> usize {
        self.space.carrier().len()
    }

    fn name(&self, x: usize) -> String {
        self.space.carrier().name(x).to_string()
    }

    fn elem_name(&self, e: Elem) -> String {
        self.q().lattice().name(e).to_string()
    }

    pub fn point(&self, name: &str) -> Result<usize, AxiomError> {
        self.space
            .carrier()
            .index_of(name)
            .ok_or_else(|| AxiomError::UnknownPoint(name.to_string()))
    }

    /// Every L-metric in the gauge of the space.
    pub fn gauge_members(&self) -> Result<&[LMetric], AxiomError> {
        let cached = self.members.get_or_init(|| {
            Ok(match &self.space {
                Space::Gauge(g) => g.enumerate(&self.limits)?,
                Space::Distance(d) => distance_gauge_members(d, &self.limits)?,
                Space::System(s) => system_gauge_members(s, &self.limits)?,
            })
        });
        cached.as_deref().map_err(Clone::clone)
    }

    /// Membership in the gauge of the space.
    pub fn is_gauge_member(&self, d: &LMetric) -> bool {
        if d.size() != self.n() || !d.is_valid(self.q()) {
            return false;
        }
        match &self.space {
            Space::Gauge(g) => g.contains(d),
            Space::Distance(delta) => distance_gauge_contains(delta, d),
            Space::System(s) => (0..self.n()).all(|x| s.contains(x, d.row(x))),
        }
    }

    /// All of `A(x)`; system presentation only.
    fn saturation(&self, x: usize) -> Result<&[LFunction], AxiomError> {
        let Space::System(s) = &self.space else {
            unreachable!("saturation of a non-system presentation");
        };
        let cached = self.saturations[x].get_or_init(|| Ok(s.saturation(x, &self.limits)?));
        cached.as_deref().map_err(Clone::clone)
    }

    /// The gauge the oracles lift; other presentations are converted.
    pub fn oracle_gauge(&self) -> Result<&GaugeBase, AxiomError> {
        let cached = self.oracle_gauge.get_or_init(|| {
            Ok(match &self.space {
                Space::Gauge(g) => g.clone(),
                Space::Distance(d) => distance_to_gauge(d, &self.limits)?,
                Space::System(s) => system_to_gauge(s, &self.limits)?,
            })
        });
        cached.as_ref().map_err(Clone::clone)
    }

    /// A gauge member satisfying `pred`, trying base members before the full
    /// enumeration.
    fn find_metric(&self, pred: impl Fn(&LMetric) -> bool) -> Result<Option<LMetric>, AxiomError> {
        if let Space::Gauge(g) = &self.space {
            if let Some(d) = g.metrics().iter().find(|d| pred(d) && g.contains(d)) {
                return Ok(Some(d.clone()));
            }
        }
        Ok(self.gauge_members()?.iter().find(|d| pred(d)).cloned())
    }

    /// A function in `A(at)` satisfying `pred`, trying `B(at)` first.
    fn find_function(&self, at: usize, pred: impl Fn(&[Elem]) -> bool) -> Result<Option<LFunction>, AxiomError> {
        let Space::System(s) = &self.space else {
            unreachable!("function search on a non-system presentation");
        };
        if let Some(phi) = s.base(at).iter().find(|phi| pred(phi) && s.contains(at, phi)) {
            return Ok(Some(phi.clone()));
        }
        Ok(self.saturation(at)?.iter().find(|phi| pred(phi)).cloned())
    }

    fn metric_evidence(&self, x: usize, y: usize, d: &LMetric) -> Evidence {
        Evidence::Metric {
            x: self.name(x),
            y: self.name(y),
            rows: (0..self.n())
                .map(|r| d.row(r).iter().map(|&e| self.elem_name(e)).collect())
                .collect(),
        }
    }

    fn function_evidence(&self, at: usize, y: usize, phi: &[Elem]) -> Evidence {
        Evidence::Function {
            at: self.name(at),
            y: self.name(y),
            phi: phi.iter().map(|&e| self.elem_name(e)).collect(),
        }
    }

    fn values_evidence(&self, x: usize, y: usize, forward: Elem, backward: Elem) -> Evidence {
        Evidence::Values {
            x: self.name(x),
            y: self.name(y),
            forward: self.elem_name(forward),
            backward: self.elem_name(backward),
        }
    }

    fn pair_evidence(&self, x: usize, y: usize) -> Evidence {
        Evidence::Pair {
            x: self.name(x),
            y: self.name(y),
        }
    }

    fn singleton(&self, x: usize, y: usize) -> Elem {
        let Space::Distance(d) = &self.space else {
            unreachable!("distance lookup on a non-distance presentation");
        };
        d.get(x, PointSet::singleton(y))
    }

    fn t0_pair(&self, x: usize, p: usize) -> Result<PairOutcome, AxiomError> {
        let bot = self.q().bottom();
        Ok(match &self.space {
            Space::Gauge(_) => match self.find_metric(|d| d.get(x, p) == bot || d.get(p, x) == bot)? {
                Some(d) => Ok(vec![self.metric_evidence(x, p, &d)]),
                None => Err(self.pair_evidence(x, p)),
            },
            Space::Distance(_) => {
                let (f, b) = (self.singleton(x, p), self.singleton(p, x));
                if f == bot || b == bot {
                    Ok(vec![self.values_evidence(x, p, f, b)])
                } else {
                    Err(self.values_evidence(x, p, f, b))
                }
            }
            Space::System(_) => {
                if let Some(phi) = self.find_function(p, |phi| phi[x] == bot)? {
                    Ok(vec![self.function_evidence(p, x, &phi)])
                } else if let Some(phi) = self.find_function(x, |phi| phi[p] == bot)? {
                    Ok(vec![self.function_evidence(x, p, &phi)])
                } else {
                    Err(self.pair_evidence(x, p))
                }
            }
        })
    }

    fn t1_pair(&self, x: usize, p: usize) -> Result<PairOutcome, AxiomError> {
        let bot = self.q().bottom();
        Ok(match &self.space {
            Space::Gauge(_) => match self.find_metric(|d| d.get(x, p) == bot && d.get(p, x) == bot)? {
                Some(d) => Ok(vec![self.metric_evidence(x, p, &d)]),
                None => Err(self.pair_evidence(x, p)),
            },
            Space::Distance(_) => {
                let (f, b) = (self.singleton(x, p), self.singleton(p, x));
                if f == bot && b == bot {
                    Ok(vec![self.values_evidence(x, p, f, b)])
                } else {
                    Err(self.values_evidence(x, p, f, b))
                }
            }
            Space::System(_) => {
                let at_p = self.find_function(p, |phi| phi[x] == bot)?;
                let at_x = self.find_function(x, |phi| phi[p] == bot)?;
                match (at_p, at_x) {
                    (Some(f), Some(g)) => Ok(vec![self.function_evidence(p, x, &f), self.function_evidence(x, p, &g)]),
                    _ => Err(self.pair_evidence(x, p)),
                }
            }
        })
    }

    /// Every member of the structure is `⊤` at `(x, y)` and `(y, x)`.
    fn d_connected_pair(&self, x: usize, y: usize) -> Result<PairOutcome, AxiomError> {
        let top = self.q().top();
        Ok(match &self.space {
            Space::Gauge(_) => match self.find_metric(|d| d.get(x, y) != top || d.get(y, x) != top)? {
                Some(d) => Err(self.metric_evidence(x, y, &d)),
                None => Ok(vec![self.values_evidence(x, y, top, top)]),
            },
            Space::Distance(_) => {
                let (f, b) = (self.singleton(x, y), self.singleton(y, x));
                if f == top && b == top {
                    Ok(vec![self.values_evidence(x, y, f, b)])
                } else {
                    Err(self.values_evidence(x, y, f, b))
                }
            }
            Space::System(_) => {
                if let Some(phi) = self.find_function(x, |phi| phi[y] != top)? {
                    Err(self.function_evidence(x, y, &phi))
                } else if let Some(phi) = self.find_function(y, |phi| phi[x] != top)? {
                    Err(self.function_evidence(y, x, &phi))
                } else {
                    Ok(vec![self.values_evidence(x, y, top, top)])
                }
            }
        })
    }

    /// Some member of the structure is `⊤` at `(x, y)` and at `(y, x)`.
    fn d_connected_literal_pair(&self, x: usize, y: usize) -> Result<PairOutcome, AxiomError> {
        let top = self.q().top();
        Ok(match &self.space {
            Space::Gauge(_) => match self.find_metric(|d| d.get(x, y) == top && d.get(y, x) == top)? {
                Some(d) => Ok(vec![self.metric_evidence(x, y, &d)]),
                None => Err(self.pair_evidence(x, y)),
            },
            Space::Distance(_) => return self.d_connected_pair(x, y),
            Space::System(_) => {
                let at_x = self.find_function(x, |phi| phi[y] == top)?;
                let at_y = self.find_function(y, |phi| phi[x] == top)?;
                match (at_x, at_y) {
                    (Some(f), Some(g)) => Ok(vec![self.function_evidence(x, y, &f), self.function_evidence(y, x, &g)]),
                    _ => Err(self.pair_evidence(x, y)),
                }
            }
        })
    }

    fn local(
        &self,
        axiom: Axiom,
        p: usize,
        pair: impl Fn(usize, usize) -> Result<PairOutcome, AxiomError>,
    ) -> Result<Verdict, AxiomError> {
        let mut evidence = Vec::new();
        for x in (0..self.n()).filter(|&x| x != p) {
            match pair(x, p)? {
                Ok(found) => evidence.extend(found),
                Err(counter) => return Ok(self.verdict(axiom, Some(p), false, Method::Characterization, vec![counter])),
            }
        }
        Ok(self.verdict(axiom, Some(p), true, Method::Characterization, evidence))
    }

    fn global(&self, pair: impl Fn(usize, usize) -> Result<PairOutcome, AxiomError>) -> Result<Verdict, AxiomError> {
        let mut evidence = Vec::new();
        for x in 0..self.n() {
            for y in x + 1..self.n() {
                match pair(x, y)? {
                    Ok(found) => evidence.extend(found),
                    Err(counter) => {
                        return Ok(self.verdict(Axiom::DConnected, None, false, Method::Characterization, vec![counter]))
                    }
                }
            }
        }
        Ok(self.verdict(Axiom::DConnected, None, true, Method::Characterization, evidence))
    }

    fn verdict(&self, axiom: Axiom, p: Option<usize>, holds: bool, method: Method, evidence: Vec<Evidence>) -> Verdict {
        Verdict {
            axiom,
            point: p.map(|p| self.name(p)),
            holds,
            method,
            presentation: self.space.presentation(),
            evidence,
        }
    }

    /// Local T0 at `p`: for every `x ≠ p` some member of the structure
    /// vanishes at `(x, p)` or at `(p, x)`.
    pub fn t0_at(&self, p: usize) -> Result<Verdict, AxiomError> {
        self.local(Axiom::T0, p, |x, p| self.t0_pair(x, p))
    }

    /// Local T1 at `p`: for every `x ≠ p` the structure vanishes both ways,
    /// through a single gauge member in the gauge presentation.
    pub fn t1_at(&self, p: usize) -> Result<Verdict, AxiomError> {
        self.local(Axiom::T1, p, |x, p| self.t1_pair(x, p))
    }

    /// `{p}` closed; decided by the same condition as local T0.
    pub fn closed_at(&self, p: usize) -> Result<Verdict, AxiomError> {
        self.local(Axiom::Closed, p, |x, p| self.t0_pair(x, p))
    }

    /// D-connected: for all `x ≠ y`, every member of the structure is `⊤` at
    /// `(x, y)` and `(y, x)`; for a distance, `δ(x, {y}) = ⊤ = δ(y, {x})`.
    pub fn d_connected(&self) -> Result<Verdict, AxiomError> {
        self.global(|x, y| self.d_connected_pair(x, y))
    }

    /// The existential reading: for all `x ≠ y` some member of the structure
    /// is `⊤` at `(x, y)` and `(y, x)`. The constant `⊤` metric always
    /// qualifies, so in the gauge and system presentations this holds for
    /// every space.
    pub fn d_connected_literal(&self) -> Result<Verdict, AxiomError> {
        self.global(|x, y| self.d_connected_literal_pair(x, y))
    }

    fn lift_verdict(&self, axiom: Axiom, p: usize, lifted: &GaugeBase) -> Verdict {
        let evidence = vec![Evidence::Lift {
            points: lifted.carrier().len(),
            base: lifted.metrics().len(),
        }];
        self.verdict(axiom, Some(p), is_discrete(lifted), Method::Oracle, evidence)
    }

    /// The initial lift on the two-copy wedge at `p` of an axis map into the
    /// square and the folding map into the discrete space.
    fn axis_lift(&self, p: usize, skewed: bool) -> Result<GaugeBase, AxiomError> {
        let g = self.oracle_gauge()?;
        let wedge = Wedge::at(g.carrier(), p, 2)?;
        let (_, product) = product_gauge_base(&[g, g], &self.limits)?;
        let (_, axis) = if skewed {
            wedge.skewed_axis_map(&self.limits)?
        } else {
            wedge.principal_axis_map(&self.limits)?
        };
        let discrete = discrete_gauge(g.quantale().clone(), g.carrier().clone());
        Ok(initial_gauge_base(
            wedge.carrier(),
            &[(axis, &product), (wedge.folding_map(), &discrete)],
            &self.limits,
        )?)
    }

    pub fn t0_oracle(&self, p: usize) -> Result<Verdict, AxiomError> {
        let lifted = self.axis_lift(p, false)?;
        Ok(self.lift_verdict(Axiom::T0, p, &lifted))
    }

    pub fn t1_oracle(&self, p: usize) -> Result<Verdict, AxiomError> {
        let lifted = self.axis_lift(p, true)?;
        Ok(self.lift_verdict(Axiom::T1, p, &lifted))
    }

    /// The initial lift on the `copies`-fold wedge of the axis map into the
    /// `copies`-fold power and the folding map.
    pub fn closed_lift(&self, p: usize, copies: usize) -> Result<GaugeBase, AxiomError> {
        let g = self.oracle_gauge()?;
        let wedge = Wedge::at(g.carrier(), p, copies)?;
        let factors = vec![g; copies];
        let (_, product) = product_gauge_base(&factors, &self.limits)?;
        let (_, axis) = wedge.infinite_axis_map(&self.limits)?;
        let discrete = discrete_gauge(g.quantale().clone(), g.carrier().clone());
        Ok(initial_gauge_base(
            wedge.carrier(),
            &[(axis, &product), (wedge.folding_map(), &discrete)],
            &self.limits,
        )?)
    }

    pub fn closed_oracle(&self, p: usize, copies: usize) -> Result<Verdict, AxiomError> {
        let lifted = self.closed_lift(p, copies)?;
        Ok(self.lift_verdict(Axiom::Closed, p, &lifted))
    }

    /// First non-constant contraction onto the discrete space with
    /// `codomain` points, by image list in lexicographic order.
    pub fn nonconstant_contraction(&self, codomain: usize) -> Result<Option<Vec<usize>>, AxiomError> {
        let g = self.oracle_gauge()?;
        let n = self.n();
        SizeGuard::check(
            "maps onto a discrete codomain",
            power(codomain, n),
            self.limits.function_candidates as u128,
        )?;
        let target = discrete_gauge(g.quantale().clone(), Carrier::numbered(codomain));
        let mut image = vec![0usize; n];
        loop {
            if image.iter().any(|&v| v != image[0]) {
                let f = PointMap::new(g.carrier().clone(), target.carrier().clone(), image.clone())?;
                if is_contraction(&f, g, &target, &self.limits)? {
                    return Ok(Some(image));
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(None);
                }
                i -= 1;
                image[i] += 1;
                if image[i] < codomain {
                    break;
                }
                image[i] = 0;
            }
        }
    }

    /// Every contraction onto a discrete space with `codomain` points is
    /// constant.
    pub fn d_connected_oracle_with(&self, codomain: usize) -> Result<Verdict, AxiomError> {
        Ok(match self.nonconstant_contraction(codomain)? {
            None => self.verdict(Axiom::DConnected, None, true, Method::Oracle, vec![]),
            Some(image) => {
                let evidence = vec![Evidence::Map {
                    image: image.iter().map(|v| v.to_string()).collect(),
                }];
                self.verdict(Axiom::DConnected, None, false, Method::Oracle, evidence)
            }
        })
    }

    pub fn d_connected_oracle(&self) -> Result<Verdict, AxiomError> {
        self.d_connected_oracle_with(2)
    }

    /// Dispatch by axiom and method. `point` is required for local axioms and
    /// ignored otherwise.
    pub fn check(&self, axiom: Axiom, point: Option<usize>, method: Method, copies: usize) -> Result<Vec<Verdict>, AxiomError> {
        if !axiom.is_local() {
            return Ok(vec![match method {
                Method::Characterization => self.d_connected()?,
                Method::Oracle => self.d_connected_oracle()?,
            }]);
        }
        let points: Vec<usize> = match point {
            Some(p) => vec![p],
            None => (0..self.n()).collect(),
        };
        points
            .into_iter()
            .map(|p| match (axiom, method) {
                (Axiom::T0, Method::Characterization) => self.t0_at(p),
                (Axiom::T1, Method::Characterization) => self.t1_at(p),
                (Axiom::Closed, Method::Characterization) => self.closed_at(p),
                (Axiom::T0, Method::Oracle) => self.t0_oracle(p),
                (Axiom::T1, Method::Oracle) => self.t1_oracle(p),
                (Axiom::Closed, Method::Oracle) => self.closed_oracle(p, copies),
                (Axiom::DConnected, _) => unreachable!(),
            })
            .collect()
    }

    fn summary(&self, method: Method, copies: usize, verdicts: &mut Vec<Verdict>) -> Result<Summary, AxiomError> {
        let mut maps: [IndexMap<String, bool>; 3] = Default::default();
        for (slot, axiom) in [Axiom::T0, Axiom::T1, Axiom::Closed].into_iter().enumerate() {
            for v in self.check(axiom, None, method, copies)? {
                maps[slot].insert(v.point.clone().unwrap_or_default(), v.holds);
                verdicts.push(v);
            }
        }
        let dc = self.check(Axiom::DConnected, None, method, copies)?.remove(0);
        let d_connected = dc.holds;
        verdicts.push(dc);
        let [t0, t1, closed] = maps;
        Ok(Summary {
            t0,
            t1,
            closed,
            d_connected,
        })
    }

    /// All four properties by characterization, and by the oracles when they
    /// fit their budgets.
    pub fn full_report(&self, with_oracle: bool, copies: usize) -> Result<Report, AxiomError> {
        let mut verdicts = Vec::new();
        let characterization = self.summary(Method::Characterization, copies, &mut verdicts)?;
        let oracle = if with_oracle {
            let mut extra = Vec::new();
            match self.summary(Method::Oracle, copies, &mut extra) {
                Ok(s) => {
                    verdicts.extend(extra);
                    Some(s)
                }
                Err(e) if e.is_size_guard() => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        Ok(Report {
            characterization,
            oracle,
            verdicts,
        })
    }

    /// Checks a verdict's evidence against the space. Oracle lifts are
    /// rebuilt and compared.
    pub fn recheck(&self, v: &Verdict, copies: usize) -> bool {
        self.recheck_inner(v, copies).unwrap_or(false)
    }

    fn recheck_inner(&self, v: &Verdict, copies: usize) -> Result<bool, AxiomError> {
        if v.presentation != self.space.presentation() {
            return Ok(false);
        }
        let q = self.q();
        let (bot, top) = (q.bottom(), q.top());
        let point = |s: &str| self.point(s);
        let elem = |s: &str| q.lattice().elem(s);
        if v.method == Method::Oracle {
            let again = self.check(v.axiom, v.point.as_deref().map(point).transpose()?, Method::Oracle, copies)?;
            if again[0].holds != v.holds {
                return Ok(false);
            }
            if let (Axiom::DConnected, false) = (v.axiom, v.holds) {
                let Some(Evidence::Map { image }) = v.evidence.first() else {
                    return Ok(false);
                };
                let image: Vec<usize> = match image.iter().map(|s| s.parse()).collect::<Result<_, _>>() {
                    Ok(i) => i,
                    Err(_) => return Ok(false),
                };
                let g = self.oracle_gauge()?;
                let target = discrete_gauge(g.quantale().clone(), Carrier::numbered(2));
                let Ok(f) = PointMap::new(g.carrier().clone(), target.carrier().clone(), image.clone()) else {
                    return Ok(false);
                };
                return Ok(image.iter().any(|&x| x != image[0]) && is_contraction(&f, g, &target, &self.limits)?);
            }
            return Ok(true);
        }
        // characterization: a false verdict carries one counterexample, a true
        // one carries witnesses for every pair
        let want_pairs: Vec<(usize, usize)> = match &v.point {
            Some(p) => {
                let p = point(p)?;
                (0..self.n()).filter(|&x| x != p).map(|x| (x, p)).collect()
            }
            None => (0..self.n())
                .flat_map(|x| (x + 1..self.n()).map(move |y| (x, y)))
                .collect(),
        };
        if !v.holds {
            let [counter] = v.evidence.as_slice() else {
                return Ok(false);
            };
            let (x, y) = match counter {
                Evidence::Pair { x, y } | Evidence::Values { x, y, .. } => (point(x)?, point(y)?),
                Evidence::Metric { x, y, .. } => (point(x)?, point(y)?),
                Evidence::Function { at, y, .. } => (point(at)?, point(y)?),
                _ => return Ok(false),
            };
            let pair = (x, y);
            if !want_pairs.contains(&pair) && !want_pairs.contains(&(y, x)) {
                return Ok(false);
            }
            let (a, b) = if want_pairs.contains(&pair) { pair } else { (y, x) };
            let fails = match v.axiom {
                Axiom::T0 | Axiom::Closed => self.t0_pair(a, b)?.is_err(),
                Axiom::T1 => self.t1_pair(a, b)?.is_err(),
                Axiom::DConnected => self.d_connected_pair(a, b)?.is_err(),
            };
            let witness_ok = match counter {
                Evidence::Metric { x, y, rows } => {
                    let d = self.parse_metric(rows)?;
                    let (x, y) = (point(x)?, point(y)?);
                    d.is_some_and(|d| self.is_gauge_member(&d) && (d.get(x, y) != top || d.get(y, x) != top))
                }
                Evidence::Function { at, y, phi } => {
                    let (at, y) = (point(at)?, point(y)?);
                    self.parse_function(phi)
                        .is_some_and(|phi| self.in_system(at, &phi) && phi[y] != top)
                }
                Evidence::Values { x, y, forward, backward } => {
                    self.values_match(point(x)?, point(y)?, forward, backward)?
                }
                _ => true,
            };
            return Ok(fails && witness_ok);
        }
        for (x, y) in want_pairs {
            let covered = v.evidence.iter().any(|e| match e {
                Evidence::Metric { x: ex, y: ey, .. } | Evidence::Values { x: ex, y: ey, .. } => {
                    point(ex).ok() == Some(x) && point(ey).ok() == Some(y)
                }
                Evidence::Function { at, y: ey, .. } => {
                    let (a, b) = (point(at).ok(), point(ey).ok());
                    (a, b) == (Some(x), Some(y)) || (a, b) == (Some(y), Some(x))
                }
                _ => false,
            });
            if !covered {
                return Ok(false);
            }
        }
        for e in &v.evidence {
            let ok = match e {
                Evidence::Metric { x, y, rows } => {
                    let (x, y) = (point(x)?, point(y)?);
                    let Some(d) = self.parse_metric(rows)? else {
                        return Ok(false);
                    };
                    self.is_gauge_member(&d)
                        && match v.axiom {
                            Axiom::T0 | Axiom::Closed => d.get(x, y) == bot || d.get(y, x) == bot,
                            Axiom::T1 => d.get(x, y) == bot && d.get(y, x) == bot,
                            Axiom::DConnected => d.get(x, y) == top && d.get(y, x) == top,
                        }
                }
                Evidence::Function { at, y, phi } => {
                    let (at, y) = (point(at)?, point(y)?);
                    let want = if v.axiom == Axiom::DConnected { top } else { bot };
                    self.parse_function(phi)
                        .is_some_and(|phi| self.in_system(at, &phi) && phi[y] == want)
                }
                Evidence::Values { x, y, forward, backward } => {
                    let (x, y) = (point(x)?, point(y)?);
                    let (Some(f), Some(b)) = (elem(forward), elem(backward)) else {
                        return Ok(false);
                    };
                    let condition = match v.axiom {
                        Axiom::T0 | Axiom::Closed => f == bot || b == bot,
                        Axiom::T1 => f == bot && b == bot,
                        Axiom::DConnected => f == top && b == top,
                    };
                    condition && self.values_match(x, y, forward, backward)?
                }
                _ => false,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn parse_metric(&self, rows: &[Vec<String>]) -> Result<Option<LMetric>, AxiomError> {
        let n = self.n();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Ok(None);
        }
        let values: Option<Vec<Elem>> = rows.iter().flatten().map(|s| self.q().lattice().elem(s)).collect();
        Ok(values.map(|v| LMetric::from_table(n, v)))
    }

    fn parse_function(&self, phi: &[String]) -> Option<LFunction> {
        if phi.len() != self.n() {
            return None;
        }
        phi.iter().map(|s| self.q().lattice().elem(s)).collect()
    }

    fn in_system(&self, at: usize, phi: &[Elem]) -> bool {
        match &self.space {
            Space::System(s) => s.contains(at, phi),
            _ => false,
        }
    }

    /// The recorded values equal the presentation's own: distance entries,
    /// or infima over the gauge or the systems.
    fn values_match(&self, x: usize, y: usize, forward: &str, backward: &str) -> Result<bool, AxiomError> {
        let l = self.q().lattice();
        let (f, b) = match &self.space {
            Space::Distance(_) => (self.singleton(x, y), self.singleton(y, x)),
            Space::Gauge(_) => {
                let members = self.gauge_members()?;
                (
                    l.meet_all(members.iter().map(|d| d.get(x, y))),
                    l.meet_all(members.iter().map(|d| d.get(y, x))),
                )
            }
            Space::System(_) => (
                l.meet_all(self.saturation(x)?.iter().map(|phi| phi[y])),
                l.meet_all(self.saturation(y)?.iter().map(|phi| phi[x])),
            ),
        };
        Ok(l.name(f) == forward && l.name(b) == backward)
    }
}

/// `f` is a contraction when every codomain base metric pulls back into the
/// domain gauge; when the codomain gauge can be enumerated within budget,
/// every member of it is checked too.
pub fn is_contraction(f: &PointMap, from: &GaugeBase, to: &GaugeBase, limits: &Limits) -> Result<bool, AxiomError> {
    if f.domain() != from.carrier() || f.codomain() != to.carrier() {
        return Err(ConstructionError::BadMap("map does not match the spaces".into()).into());
    }
    let pulls_back = |d: &LMetric| from.contains(&d.pullback(f.assignment()));
    if !to.metrics().iter().all(pulls_back) {
        return Ok(false);
    }
    match to.enumerate(limits) {
        Ok(all) => Ok(all.iter().all(pulls_back)),
        Err(_) => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quantale::Lattice;
    use crate::transitions::{distance_to_system, gauge_to_distance, Mode};

    fn fifths_example() -> ApproachDistance {
        let l = Lattice::chain(&["0", "1/5", "1/4", "1/3", "1/2", "1"]).unwrap();
        let q = Arc::new(Quantale::meet(l).unwrap());
        let c = Carrier::new(&["a", "b", "c"]).unwrap();
        let e = |s: &str| q.lattice().elem(s).unwrap();
        let mut partial = vec![None; 3 << 3];
        let mut put = |x: usize, a: u64, v: &str| partial[(x << 3) + a as usize] = Some(e(v));
        put(1, 0b001, "0");
        put(2, 0b001, "0");
        put(0, 0b010, "1/2");
        put(0, 0b110, "1/2");
        put(2, 0b010, "1/3");
        put(2, 0b011, "1/3");
        put(0, 0b100, "1/4");
        put(1, 0b100, "1/5");
        put(1, 0b101, "1/5");
        ApproachDistance::complete(q, c, &partial, &Limits::default()).unwrap()
    }

    fn all_presentations(delta: &ApproachDistance) -> Vec<Analyzer> {
        let limits = Limits::default();
        let g = distance_to_gauge(delta, &limits).unwrap();
        let s = distance_to_system(delta, &limits).unwrap();
        vec![
            Analyzer::new(Space::Distance(delta.clone()), limits),
            Analyzer::new(Space::Gauge(g), limits),
            Analyzer::new(Space::System(s), limits),
        ]
    }

    #[test]
    fn worked_example_verdicts() {
        let delta = fifths_example();
        for a in all_presentations(&delta) {
            let t0: Vec<bool> = (0..3).map(|p| a.t0_at(p).unwrap().holds).collect();
            let t1: Vec<bool> = (0..3).map(|p| a.t1_at(p).unwrap().holds).collect();
            let closed: Vec<bool> = (0..3).map(|p| a.closed_at(p).unwrap().holds).collect();
            assert_eq!(t0, vec![true, false, false], "{:?}", a.space().presentation());
            assert_eq!(t1, vec![false, false, false]);
            assert_eq!(closed, t0);
            assert!(!a.d_connected().unwrap().holds);
        }
    }

    #[test]
    fn worked_example_counterexample_at_b() {
        let a = Analyzer::new(Space::Distance(fifths_example()), Limits::default());
        let v = a.t0_at(1).unwrap();
        assert_eq!(
            v.evidence,
            vec![Evidence::Values {
                x: "c".into(),
                y: "b".into(),
                forward: "1/3".into(),
                backward: "1/5".into()
            }]
        );
    }

    #[test]
    fn worked_example_oracles_on_chain() {
        let delta = fifths_example();
        let a = Analyzer::new(Space::Distance(delta), Limits::default());
        let t0: Vec<bool> = (0..3).map(|p| a.t0_oracle(p).unwrap().holds).collect();
        assert_eq!(t0, vec![true, false, false]);
        let t1: Vec<bool> = (0..3).map(|p| a.t1_oracle(p).unwrap().holds).collect();
        assert_eq!(t1, vec![false, false, false]);
        let closed: Vec<bool> = (0..3).map(|p| a.closed_oracle(p, 3).unwrap().holds).collect();
        assert_eq!(closed, vec![true, false, false]);
    }

    #[test]
    fn constant_top_space_is_d_connected() {
        let l = Lattice::chain(&["-1", "0", "1", "3"]).unwrap();
        let q = Arc::new(Quantale::meet(l).unwrap());
        let delta = ApproachDistance::indiscrete(q, Carrier::numbered(3));
        for a in all_presentations(&delta) {
            assert!(a.d_connected().unwrap().holds);
            assert!(a.d_connected_oracle().unwrap().holds);
            assert!((0..3).all(|p| !a.t0_at(p).unwrap().holds));
        }
    }

    #[test]
    fn discrete_space() {
        let q = Arc::new(Quantale::meet(Lattice::chain_of(3)).unwrap());
        let g = GaugeBase::discrete(q, Carrier::numbered(2));
        let a = Analyzer::new(Space::Gauge(g), Limits::default());
        for p in 0..2 {
            assert!(a.t0_at(p).unwrap().holds);
            assert!(a.t1_at(p).unwrap().holds);
            assert!(a.closed_at(p).unwrap().holds);
            assert!(a.t0_oracle(p).unwrap().holds);
        }
        assert!(!a.d_connected().unwrap().holds);
        assert!(!a.d_connected_oracle().unwrap().holds);
        // the existential reading is fooled by the constant top metric
        assert!(a.d_connected_literal().unwrap().holds);
    }

    #[test]
    fn one_point_space() {
        let q = Arc::new(Quantale::meet(Lattice::chain_of(2)).unwrap());
        let g = GaugeBase::indiscrete(q, Carrier::numbered(1));
        let a = Analyzer::new(Space::Gauge(g), Limits::default());
        let r = a.full_report(true, 3).unwrap();
        assert!(r.characterization.t0["x0"] && r.characterization.t1["x0"] && r.characterization.closed["x0"]);
        assert!(r.characterization.d_connected);
        assert_eq!(r.oracle.as_ref(), Some(&r.characterization));
    }

    #[test]
    fn contractions() {
        let q = Arc::new(Quantale::meet(Lattice::chain_of(2)).unwrap());
        let c = Carrier::numbered(2);
        let ind = GaugeBase::indiscrete(q.clone(), c.clone());
        let dis = GaugeBase::discrete(q.clone(), c.clone());
        let id = PointMap::identity(c.clone());
        let l = Limits::default();
        assert!(is_contraction(&id, &ind, &ind, &l).unwrap());
        assert!(is_contraction(&id, &dis, &ind, &l).unwrap());
        assert!(!is_contraction(&id, &ind, &dis, &l).unwrap());
        let konst = PointMap::constant(c.clone(), c.clone(), 1).unwrap();
        assert!(is_contraction(&konst, &ind, &dis, &l).unwrap());
    }

    #[test]
    fn boolean_diamond_separates_t0_from_its_lift() {
        // d(x,p) = b and d(p,x) = a: no member vanishes at either pair, but
        // a ∧ b = ⊥ makes the wedge lift discrete.
        let q = Arc::new(Quantale::meet(Lattice::diamond()).unwrap());
        let l = q.lattice();
        let (a, b, t) = (l.elem("a").unwrap(), l.elem("b").unwrap(), l.top());
        let c = Carrier::new(&["p", "x"]).unwrap();
        let d = LMetric::from_table(2, vec![t, a, b, t]);
        let g = GaugeBase::new(q, c, vec![d], &Limits::default()).unwrap();
        let an = Analyzer::new(Space::Gauge(g), Limits::default());
        assert!(!an.t0_at(0).unwrap().holds);
        assert!(an.t0_oracle(0).unwrap().holds);
    }

    #[test]
    fn two_point_chain_order_is_d_connected_by_contractions_only() {
        // R(x,y) = ⊥, R(y,x) = ⊤: every non-constant map to two discrete
        // points fails to contract, yet the gauge is not ⊤ at (x,y).
        let q = Arc::new(Quantale::meet(Lattice::chain_of(2)).unwrap());
        let (t, b) = (q.top(), q.bottom());
        let g = GaugeBase::new(q, Carrier::numbered(2), vec![LMetric::from_table(2, vec![t, b, t, t])], &Limits::default())
            .unwrap();
        let a = Analyzer::new(Space::Gauge(g), Limits::default());
        assert!(a.d_connected_oracle().unwrap().holds);
        assert!(!a.d_connected().unwrap().holds);
    }

    #[test]
    fn verdicts_recheck() {
        let delta = fifths_example();
        for a in all_presentations(&delta) {
            let r = a.full_report(true, 3).unwrap();
            for v in &r.verdicts {
                assert!(a.recheck(v, 3), "{v:?}");
            }
        }
        let q = Arc::new(Quantale::meet(Lattice::chain_of(3)).unwrap());
        let dis = GaugeBase::discrete(q.clone(), Carrier::numbered(2));
        let a = Analyzer::new(Space::Gauge(dis), Limits::default());
        for v in a.full_report(true, 3).unwrap().verdicts {
            assert!(a.recheck(&v, 3), "{v:?}");
            let mut flipped = v.clone();
            flipped.holds = !flipped.holds;
            assert!(!a.recheck(&flipped, 3), "{flipped:?}");
        }
    }

    #[test]
    fn gauge_to_distance_agrees_on_worked_example() {
        let delta = fifths_example();
        let g = distance_to_gauge(&delta, &Limits::default()).unwrap();
        assert_eq!(gauge_to_distance(&g, Mode::Oracle, &Limits::default()).unwrap(), delta);
        assert_eq!(gauge_to_distance(&g, Mode::Base, &Limits::default()).unwrap(), delta);
    }
}
