//! Name resolution and validation of parsed documents, and the way back from
//! a space to a document.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::parse::{
    parse_document, DeltaEntry, Diagnostic, FunctionDecl, MetricDecl, Name, QuantaleDecl, Span, Spanned,
    StructureDecl, StructureDoc,
};
use crate::axioms::Space;
use crate::limits::{Limits, SizeGuard};
use crate::quantale::{Elem, Lattice, LatticeError, Quantale, QuantaleError};
use crate::structures::{
    ApproachDistance, ApproachSystemBase, Carrier, GaugeBase, LFunction, LMetric, PointSet, StructureError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    /// Syntax or name resolution.
    #[error("{}", render_all(.0))]
    Parse(Vec<Diagnostic>),
    /// A declared structure breaks an axiom.
    #[error("{0}")]
    Invalid(Diagnostic),
    #[error(transparent)]
    SizeGuard(SizeGuard),
}

fn render_all(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

impl LoadError {
    /// The process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LoadError::Parse(_) => 2,
            LoadError::Invalid(_) => 3,
            LoadError::SizeGuard(_) => 4,
        }
    }
}

/// A loaded document: the space plus the names it declared.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub doc: StructureDoc,
    pub space: Space,
}

/// Parses, resolves and validates a document.
pub fn load(text: &str, limits: &Limits) -> Result<Loaded, LoadError> {
    let doc = parse_document(text).map_err(LoadError::Parse)?;
    let space = build(&doc, limits)?;
    Ok(Loaded { doc, space })
}

struct Resolver {
    diags: Vec<Diagnostic>,
}

impl Resolver {
    fn err(&mut self, span: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(span, msg));
    }

    fn finish(&mut self) -> Result<(), LoadError> {
        if self.diags.is_empty() {
            Ok(())
        } else {
            Err(LoadError::Parse(std::mem::take(&mut self.diags)))
        }
    }
}

fn invalid(span: Span, msg: impl Into<String>) -> LoadError {
    LoadError::Invalid(Diagnostic::error(span, msg))
}

fn structure_error(span: Span, e: StructureError) -> LoadError {
    match e {
        StructureError::SizeGuard(g) => LoadError::SizeGuard(g),
        StructureError::MissingSingleton(..) => LoadError::Parse(vec![
            Diagnostic::error(span, e.to_string()).with_hint("list every off-diagonal singleton `delta x {y} = v`"),
        ]),
        other => invalid(span, other.to_string()),
    }
}

fn quantale_of(decl: &QuantaleDecl, header: Span, limits: &Limits) -> Result<Arc<Quantale>, LoadError> {
    let mut r = Resolver { diags: vec![] };
    let mut seen = HashMap::new();
    for e in &decl.elements {
        if let Some(prev) = seen.insert(e.value.clone(), e.span) {
            r.err(e.span, format!("element `{}` already declared at {prev}", e.value));
        }
    }
    if decl.elements.is_empty() {
        r.err(header, "no elements declared");
    }
    let known = |n: &Name, r: &mut Resolver| {
        if !seen.contains_key(&n.value) {
            r.err(n.span, format!("unknown element `{}`", n.value));
        }
    };
    for chain in &decl.leq {
        for n in chain {
            known(n, &mut r);
        }
    }
    for n in decl.bottom.iter().chain(&decl.top) {
        known(n, &mut r);
    }
    for entry in &decl.star {
        for n in entry {
            known(n, &mut r);
        }
    }
    r.finish()?;

    let names: Vec<&str> = decl.elements.iter().map(|e| e.as_str()).collect();
    let pairs: Vec<(&str, &str)> = decl
        .leq
        .iter()
        .flat_map(|c| c.windows(2).map(|w| (w[0].as_str(), w[1].as_str())))
        .collect();
    let lattice = Lattice::from_pairs(&names, &pairs).map_err(|e| match e {
        LatticeError::Empty | LatticeError::TooLarge(_) | LatticeError::DuplicateElement(_) | LatticeError::UnknownElement(_) => {
            LoadError::Parse(vec![Diagnostic::error(header, e.to_string())])
        }
        other => invalid(header, format!("not a lattice: {other}")),
    })?;
    for (given, actual, role) in [(&decl.bottom, lattice.bottom(), "bottom"), (&decl.top, lattice.top(), "top")] {
        if let Some(n) = given {
            if n.value != lattice.name(actual) {
                return Err(invalid(
                    n.span,
                    format!("declared {role} `{}` is not the {role} of the order, `{}` is", n.value, lattice.name(actual)),
                ));
            }
        }
    }

    let size = lattice.len();
    let mut table: Vec<Option<Elem>> = vec![None; size * size];
    if decl.star_meet {
        if !lattice.is_distributive() {
            return Err(invalid(header, "`star: meet` needs a distributive lattice"));
        }
        for a in lattice.elements() {
            for b in lattice.elements() {
                table[a.index() * size + b.index()] = Some(lattice.meet(a, b));
            }
        }
    }
    let mut written = HashSet::new();
    for [a, b, c] in &decl.star {
        let (ea, eb, ec) = (
            lattice.elem(a.as_str()).expect("resolved"),
            lattice.elem(b.as_str()).expect("resolved"),
            lattice.elem(c.as_str()).expect("resolved"),
        );
        if !written.insert((ea, eb)) {
            r.err(a.span, format!("tensor entry `{}*{}` given twice", a.value, b.value));
        }
        table[ea.index() * size + eb.index()] = Some(ec);
    }
    for a in lattice.elements() {
        for b in lattice.elements() {
            if table[a.index() * size + b.index()].is_none() {
                r.diags.push(
                    Diagnostic::error(header, format!("tensor entry `{}*{}` missing", lattice.name(a), lattice.name(b)))
                        .with_hint("give the full table or `star: meet`"),
                );
            }
        }
    }
    r.finish()?;
    let star = table.into_iter().map(|e| e.expect("complete")).collect();
    let q = Quantale::with_limits(lattice, star, limits).map_err(|e| match e {
        QuantaleError::SizeGuard(g) => LoadError::SizeGuard(g),
        other => invalid(header, format!("not a quantale: {other}")),
    })?;
    Ok(Arc::new(q))
}

fn carrier_of(points: &[Name]) -> Result<Carrier, LoadError> {
    let mut r = Resolver { diags: vec![] };
    let mut seen = HashMap::new();
    for p in points {
        if let Some(prev) = seen.insert(p.value.clone(), p.span) {
            r.err(p.span, format!("point `{}` already declared at {prev}", p.value));
        }
    }
    if points.is_empty() {
        r.err(Span { line: 1, col: 1, len: 0 }, "no points declared");
    }
    r.finish()?;
    let names: Vec<&str> = points.iter().map(|p| p.as_str()).collect();
    Carrier::new(&names).map_err(|e| LoadError::Parse(vec![Diagnostic::error(points[0].span, e.to_string())]))
}

fn elem(q: &Quantale, n: &Name, r: &mut Resolver) -> Elem {
    match q.lattice().elem(n.as_str()) {
        Some(e) => e,
        None => {
            r.err(n.span, format!("unknown element `{}`", n.value));
            Elem(0)
        }
    }
}

fn point(c: &Carrier, n: &Name, r: &mut Resolver) -> usize {
    match c.index_of(n.as_str()) {
        Some(x) => x,
        None => {
            r.err(n.span, format!("unknown point `{}`", n.value));
            0
        }
    }
}

fn metric_table(q: &Quantale, c: &Carrier, m: &MetricDecl, r: &mut Resolver) -> LMetric {
    let n = c.len();
    let mut table = vec![q.bottom(); n * n];
    let mut seen = vec![false; n];
    for (p, values) in &m.rows {
        let before = r.diags.len();
        let x = point(c, p, r);
        if r.diags.len() > before {
            continue;
        }
        if std::mem::replace(&mut seen[x], true) {
            r.err(p.span, format!("row `{}` given twice in metric `{}`", p.value, m.name.value));
        }
        if values.len() != n {
            r.err(p.span, format!("row `{}` has {} values, expected {n}", p.value, values.len()));
            continue;
        }
        for (y, v) in values.iter().enumerate() {
            table[x * n + y] = elem(q, v, r);
        }
    }
    for x in (0..n).filter(|&x| !seen[x]) {
        r.err(m.name.span, format!("metric `{}` has no row for `{}`", m.name.value, c.name(x)));
    }
    LMetric::from_table(n, table)
}

fn function_table(q: &Quantale, c: &Carrier, f: &FunctionDecl, r: &mut Resolver) -> LFunction {
    let n = c.len();
    let mut phi = vec![q.bottom(); n];
    let mut seen = vec![false; n];
    for (p, v) in &f.entries {
        let before = r.diags.len();
        let x = point(c, p, r);
        if r.diags.len() > before {
            continue;
        }
        if std::mem::replace(&mut seen[x], true) {
            r.err(p.span, format!("`{}` given twice in function `{}`", p.value, f.name.value));
        }
        phi[x] = elem(q, v, r);
    }
    for x in (0..n).filter(|&x| !seen[x]) {
        r.err(f.name.span, format!("function `{}` has no value at `{}`", f.name.value, c.name(x)));
    }
    phi
}

fn unique_names<'a>(names: impl Iterator<Item = &'a Name>, what: &str, r: &mut Resolver) {
    let mut seen = HashMap::new();
    for n in names {
        if let Some(prev) = seen.insert(n.value.clone(), n.span) {
            r.err(n.span, format!("{what} `{}` already declared at {prev}", n.value));
        }
    }
}

/// Resolves names and validates every declared structure.
pub fn build(doc: &StructureDoc, limits: &Limits) -> Result<Space, LoadError> {
    let header = doc.structure.span;
    let q = quantale_of(&doc.quantale, header, limits)?;
    let carrier = carrier_of(&doc.points)?;
    let mut r = Resolver { diags: vec![] };
    unique_names(doc.metrics.iter().map(|m| &m.name), "metric", &mut r);
    unique_names(doc.functions.iter().map(|f| &f.name), "function", &mut r);
    let metrics: HashMap<&str, LMetric> = doc
        .metrics
        .iter()
        .map(|m| (m.name.as_str(), metric_table(&q, &carrier, m, &mut r)))
        .collect();
    let functions: HashMap<&str, LFunction> = doc
        .functions
        .iter()
        .map(|f| (f.name.as_str(), function_table(&q, &carrier, f, &mut r)))
        .collect();
    r.finish()?;
    let n = carrier.len();
    match &doc.structure.value {
        StructureDecl::Gauge { base } => {
            let mut chosen = Vec::new();
            for name in base {
                match metrics.get(name.as_str()) {
                    Some(d) => chosen.push(d.clone()),
                    None => r.err(name.span, format!("unknown metric `{}`", name.value)),
                }
            }
            if base.is_empty() {
                r.err(header, "a gauge needs `base: ...` with at least one metric");
            }
            r.finish()?;
            // check each metric first so the error names it
            for (name, d) in base.iter().zip(&chosen) {
                crate::structures::validate_lmetric(&q, &carrier, d.values().to_vec())
                    .map_err(|e| invalid(name.span, format!("metric `{}`: {e}", name.value)))?;
            }
            GaugeBase::new(q, carrier, chosen, limits)
                .map(Space::Gauge)
                .map_err(|e| structure_error(header, e))
        }
        StructureDecl::Distance { entries } => {
            if n > limits.distance_points.min(24) {
                return Err(LoadError::SizeGuard(SizeGuard {
                    what: "distance table over all subsets",
                    needed: n as u128,
                    limit: limits.distance_points.min(24) as u128,
                }));
            }
            let mut partial: Vec<Option<Elem>> = vec![None; n << n];
            let mut seen: HashMap<(usize, PointSet), Span> = HashMap::new();
            for DeltaEntry { x, set, value } in entries {
                let before = r.diags.len();
                let px = point(&carrier, x, &mut r);
                let mut a = PointSet::EMPTY;
                for m in set {
                    let y = point(&carrier, m, &mut r);
                    if a.contains(y) && r.diags.len() == before {
                        r.err(m.span, format!("`{}` listed twice in the set", m.value));
                    }
                    a.insert(y);
                }
                let v = elem(&q, value, &mut r);
                if r.diags.len() > before {
                    continue;
                }
                if let Some(prev) = seen.insert((px, a), x.span) {
                    r.err(x.span, format!("entry for this pair already given at {prev}"));
                    continue;
                }
                partial[(px << n) + a.0 as usize] = Some(v);
            }
            r.finish()?;
            ApproachDistance::complete(q, carrier, &partial, limits)
                .map(Space::Distance)
                .map_err(|e| structure_error(header, e))
        }
        StructureDecl::System { at } => {
            let mut bases: Vec<Option<Vec<LFunction>>> = vec![None; n];
            for (p, names) in at {
                let before = r.diags.len();
                let x = point(&carrier, p, &mut r);
                let mut fam = Vec::new();
                for name in names {
                    match functions.get(name.as_str()) {
                        Some(f) => fam.push(f.clone()),
                        None => r.err(name.span, format!("unknown function `{}`", name.value)),
                    }
                }
                if r.diags.len() > before {
                    continue;
                }
                if bases[x].is_some() {
                    r.err(p.span, format!("`at {}` given twice", p.value));
                }
                bases[x] = Some(fam);
            }
            for x in (0..n).filter(|&x| bases[x].is_none()) {
                r.err(header, format!("no `at {}: ...` line", carrier.name(x)));
            }
            r.finish()?;
            let bases = bases.into_iter().map(|b| b.expect("complete")).collect();
            ApproachSystemBase::new(q, carrier, bases)
                .map(Space::System)
                .map_err(|e| structure_error(header, e))
        }
    }
}

fn bare(s: &str) -> Name {
    Spanned::bare(s.to_string())
}

/// Names usable in the text format: characters the lexer treats as
/// punctuation become `_`, and clashes get a numeric suffix.
fn printable_names(names: &[String]) -> Vec<String> {
    let mut used = HashSet::new();
    names
        .iter()
        .map(|n| {
            let base: String = n
                .chars()
                .map(|c| if c.is_whitespace() || "{},=:#<*".contains(c) { '_' } else { c })
                .collect();
            let base = if base.is_empty() { "_".to_string() } else { base };
            let mut name = base.clone();
            let mut k = 1;
            while !used.insert(name.clone()) {
                k += 1;
                name = format!("{base}_{k}");
            }
            name
        })
        .collect()
}

fn quantale_decl(q: &Quantale, en: &[String]) -> QuantaleDecl {
    let l = q.lattice();
    let name = |e: Elem| bare(&en[e.index()]);
    let leq = l
        .covers()
        .into_iter()
        .map(|(a, b)| vec![name(a), name(b)])
        .collect();
    let star_meet = l.is_distributive();
    let star = l
        .elements()
        .flat_map(|a| l.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| !star_meet || q.star(a, b) != l.meet(a, b))
        .map(|(a, b)| [name(a), name(b), name(q.star(a, b))])
        .collect();
    QuantaleDecl {
        elements: en.iter().map(|s| bare(s)).collect(),
        bottom: Some(name(l.bottom())),
        top: Some(name(l.top())),
        leq,
        star_meet,
        star,
    }
}

/// A document that loads back to `space`, up to renaming points or
/// elements whose names the format cannot hold. Distances are written as their
/// off-diagonal singletons; metrics are named `d1, d2, ...` and functions
/// `f1, f2, ...`.
pub fn document_of(space: &Space) -> StructureDoc {
    let q = space.quantale();
    let c = space.carrier();
    let en = printable_names(q.lattice().names());
    let pn = printable_names(c.points());
    let elem = |e: Elem| bare(&en[e.index()]);
    let point = |x: usize| bare(&pn[x]);
    let n = c.len();
    let mut metrics = Vec::new();
    let mut functions = Vec::new();
    let structure = match space {
        Space::Gauge(g) => {
            let mut base = Vec::new();
            for (i, d) in g.metrics().iter().enumerate() {
                let name = format!("d{}", i + 1);
                metrics.push(MetricDecl {
                    name: bare(&name),
                    rows: (0..n)
                        .map(|x| (point(x), d.row(x).iter().map(|&v| elem(v)).collect()))
                        .collect(),
                });
                base.push(bare(&name));
            }
            StructureDecl::Gauge { base }
        }
        Space::Distance(delta) => {
            let mut entries = Vec::new();
            for x in 0..n {
                for y in (0..n).filter(|&y| y != x) {
                    entries.push(DeltaEntry {
                        x: point(x),
                        set: vec![point(y)],
                        value: elem(delta.get(x, PointSet::singleton(y))),
                    });
                }
            }
            StructureDecl::Distance { entries }
        }
        Space::System(s) => {
            let mut names: HashMap<&LFunction, String> = HashMap::new();
            let mut at = Vec::new();
            for x in 0..n {
                let mut fam = Vec::new();
                for phi in s.base(x) {
                    let next = names.len() + 1;
                    let name = names.entry(phi).or_insert_with(|| {
                        let name = format!("f{next}");
                        functions.push(FunctionDecl {
                            name: bare(&name),
                            entries: (0..n).map(|y| (point(y), elem(phi[y]))).collect(),
                        });
                        name
                    });
                    fam.push(bare(name));
                }
                at.push((point(x), fam));
            }
            StructureDecl::System { at }
        }
    };
    StructureDoc {
        quantale: quantale_decl(q, &en),
        points: pn.iter().map(|p| bare(p)).collect(),
        metrics,
        functions,
        structure: Spanned::bare(structure),
    }
}
