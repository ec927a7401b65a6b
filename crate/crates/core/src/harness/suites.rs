//! The checks run on each instance, and the ones run once per sweep.

use std::collections::HashSet;

use super::{Class, Finding, Instance, Outcome, Suite, SweepConfig, D_CONNECTED, T0_NOT_T1};
use crate::axioms::{Analyzer, Axiom, AxiomError, Method, Space, Summary, Verdict};
use crate::io::{document_of, load, print_document, LoadError};
use crate::quantale::{Lattice, Quantale, QuantaleError};
use crate::structures::{enumerate_functions, render, ApproachDistance};
use crate::transitions::{
    distance_system_contains, distance_to_gauge, distance_to_system, gauge_to_distance, system_to_distance, Mode,
    TransitionError,
};

struct Ctx<'a> {
    inst: &'a Instance,
    cfg: &'a SweepConfig,
    out: Outcome,
    document: Option<String>,
}

impl Ctx<'_> {
    fn document(&mut self) -> String {
        self.document
            .get_or_insert_with(|| print_document(&document_of(&self.inst.space)))
            .clone()
    }

    fn finding(&mut self, suite: Suite, class: Class, subject: String, expected: String, actual: String) {
        let document = Some(self.document());
        self.out.report(Finding {
            suite,
            class,
            label: self.inst.label.clone(),
            subject,
            expected,
            actual,
            document,
        });
    }

    /// Counts one check; a size guard makes it a skip, other errors a
    /// violation.
    fn attempt<T>(&mut self, suite: Suite, subject: &str, r: Result<T, String>, guarded: bool) -> Option<T> {
        match r {
            Ok(v) => {
                self.out.checked(suite);
                Some(v)
            }
            Err(_) if guarded => {
                self.out.skipped(suite);
                None
            }
            Err(e) => {
                self.out.checked(suite);
                self.finding(suite, Class::Violation, subject.to_string(), "no error".into(), e);
                None
            }
        }
    }
}

fn axiom_err<T>(r: Result<T, AxiomError>) -> (Result<T, String>, bool) {
    match r {
        Ok(v) => (Ok(v), false),
        Err(e) => {
            let g = e.is_size_guard();
            (Err(e.to_string()), g)
        }
    }
}

fn transition_err<T>(r: Result<T, TransitionError>) -> (Result<T, String>, bool) {
    match r {
        Ok(v) => (Ok(v), false),
        Err(e) => {
            let g = matches!(e, TransitionError::SizeGuard(_));
            (Err(e.to_string()), g)
        }
    }
}

fn subject(v: &Verdict) -> String {
    match &v.point {
        Some(p) => format!("{} at {p}", v.axiom.label()),
        None => v.axiom.label().to_string(),
    }
}

fn char_oracle(ctx: &mut Ctx, a: &Analyzer) {
    let n = a.space().carrier().len();
    let copies = ctx.cfg.copies;
    let mut pairs: Vec<(Axiom, Option<usize>)> = Vec::new();
    for axiom in [Axiom::T0, Axiom::T1, Axiom::Closed] {
        pairs.extend((0..n).map(|p| (axiom, Some(p))));
    }
    pairs.push((Axiom::DConnected, None));
    for (axiom, p) in pairs {
        let both = a.check(axiom, p, Method::Characterization, copies).and_then(|c| {
            let o = a.check(axiom, p, Method::Oracle, copies)?;
            Ok((c.into_iter().next().expect("one verdict"), o.into_iter().next().expect("one verdict")))
        });
        let (r, guarded) = axiom_err(both);
        let label = format!("{} at {p:?}", axiom.label());
        if let Some((c, o)) = ctx.attempt(Suite::CharOracle, &label, r, guarded) {
            if c.holds != o.holds {
                ctx.finding(
                    Suite::CharOracle,
                    Class::Violation,
                    subject(&c),
                    format!("oracle {}", o.holds),
                    format!("characterization {}", c.holds),
                );
            }
        }
    }
}

fn implications(ctx: &mut Ctx, s: &Summary, n: usize) {
    let fail = |ctx: &mut Ctx, subj: String, expected: &str, actual: String| {
        ctx.finding(Suite::Implications, Class::Violation, subj, expected.to_string(), actual);
    };
    for (p, &t0) in &s.t0 {
        ctx.out.checked(Suite::Implications);
        if s.t1[p] && !t0 {
            fail(ctx, format!("t1 implies t0 at {p}"), "t0 true", "t1 true, t0 false".into());
        }
        if s.closed[p] != t0 {
            fail(ctx, format!("closed iff t0 at {p}"), "equal", format!("closed {}, t0 {t0}", s.closed[p]));
        }
        if s.d_connected && n >= 2 && t0 {
            fail(ctx, format!("d_connected excludes t0 at {p}"), "t0 false", "d_connected true, t0 true".into());
        }
    }
}

fn summary(space: Space, cfg: &SweepConfig) -> Result<Summary, AxiomError> {
    Ok(Analyzer::new(space, cfg.limits).full_report(false, cfg.copies)?.characterization)
}

fn presentations(ctx: &mut Ctx, own: &Summary) {
    let cfg = ctx.cfg;
    let others: Result<Vec<Space>, TransitionError> = match &ctx.inst.space {
        Space::Distance(d) => (|| Ok(vec![Space::Gauge(distance_to_gauge(d, &cfg.limits)?), Space::System(distance_to_system(d, &cfg.limits)?)]))(),
        Space::Gauge(g) => (|| {
            let d = gauge_to_distance(g, Mode::Base, &cfg.limits)?;
            let s = distance_to_system(&d, &cfg.limits)?;
            Ok(vec![Space::Distance(d), Space::System(s)])
        })(),
        Space::System(s) => (|| {
            let d = system_to_distance(s, Mode::Base, &cfg.limits)?;
            let g = distance_to_gauge(&d, &cfg.limits)?;
            Ok(vec![Space::Distance(d), Space::Gauge(g)])
        })(),
    };
    let (r, guarded) = transition_err(others);
    let Some(others) = ctx.attempt(Suite::Presentations, "transitions", r, guarded) else {
        return;
    };
    for other in others {
        let p = other.presentation();
        let (r, guarded) = axiom_err(summary(other, cfg));
        let Some(theirs) = ctx.attempt(Suite::Presentations, &format!("verdicts on {p:?}"), r, guarded) else {
            continue;
        };
        let rows = [("t0", &own.t0, &theirs.t0), ("t1", &own.t1, &theirs.t1), ("closed", &own.closed, &theirs.closed)];
        for (name, mine, other) in rows {
            for (pt, v) in mine {
                if other.get(pt) != Some(v) {
                    ctx.finding(
                        Suite::Presentations,
                        Class::Violation,
                        format!("{name} at {pt} after conversion to {}", label(p)),
                        v.to_string(),
                        other.get(pt).map_or("missing".into(), |b| b.to_string()),
                    );
                }
            }
        }
        if own.d_connected != theirs.d_connected {
            ctx.finding(
                Suite::Presentations,
                Class::Violation,
                format!("d_connected after conversion to {}", label(p)),
                own.d_connected.to_string(),
                theirs.d_connected.to_string(),
            );
        }
    }
}

fn label(p: crate::axioms::Presentation) -> &'static str {
    match p {
        crate::axioms::Presentation::Gauge => "gauge",
        crate::axioms::Presentation::Distance => "distance",
        crate::axioms::Presentation::System => "system",
    }
}

fn round_trip(ctx: &mut Ctx, a: &Analyzer) {
    let cfg = ctx.cfg;
    let space = &ctx.inst.space;
    if space.carrier().len() > cfg.round_trip_max_carrier || space.quantale().len() > cfg.round_trip_max_lattice {
        return;
    }
    match space {
        Space::Gauge(g) => {
            let back = (|| {
                let d = gauge_to_distance(g, Mode::Base, &cfg.limits)?;
                distance_to_gauge(&d, &cfg.limits)
            })();
            let (r, guarded) = transition_err(back);
            let Some(back) = ctx.attempt(Suite::RoundTrip, "gauge round trip", r, guarded) else {
                return;
            };
            let before = axiom_err(a.gauge_members().map(|m| m.iter().cloned().collect::<HashSet<_>>()));
            let after = axiom_err(Analyzer::new(Space::Gauge(back), cfg.limits)
                .gauge_members()
                .map(|m| m.iter().cloned().collect::<HashSet<_>>()));
            if let ((Ok(b), _), (Ok(c), _)) = (before, after) {
                if b != c {
                    ctx.finding(
                        Suite::RoundTrip,
                        Class::Violation,
                        "gauge to distance to gauge".into(),
                        format!("{} members", b.len()),
                        format!("{} members, {} shared", c.len(), b.intersection(&c).count()),
                    );
                }
            }
        }
        Space::Distance(d) => {
            let back = (|| {
                let s = distance_to_system(d, &cfg.limits)?;
                system_to_distance(&s, Mode::Base, &cfg.limits)
            })();
            let (r, guarded) = transition_err(back);
            if let Some(back) = ctx.attempt(Suite::RoundTrip, "distance round trip", r, guarded) {
                if back.values() != d.values() {
                    ctx.finding(
                        Suite::RoundTrip,
                        Class::Violation,
                        "distance to system to distance".into(),
                        "same table".into(),
                        first_difference(d, &back),
                    );
                }
            }
        }
        Space::System(_) => {}
    }
}

/// The system of `d` against the system of the distance it gives back,
/// compared by membership of every function.
fn system_round_trip(ctx: &mut Ctx, d: &ApproachDistance) {
    let cfg = ctx.cfg;
    let n = d.carrier().len();
    let r = (|| -> Result<Option<String>, TransitionError> {
        let b = distance_to_system(d, &cfg.limits)?;
        let back = system_to_distance(&b, Mode::Base, &cfg.limits)?;
        let all = enumerate_functions(d.quantale(), n, &cfg.limits)?;
        for x in 0..n {
            for phi in &all {
                let before = b.contains(x, phi);
                let after = distance_system_contains(&back, x, phi);
                if before != after {
                    return Ok(Some(format!(
                        "at {}: [{}] {} before, {} after",
                        d.carrier().name(x),
                        render(d.quantale(), d.carrier(), phi),
                        before,
                        after
                    )));
                }
            }
        }
        Ok(None)
    })();
    let (r, guarded) = transition_err(r);
    if let Some(Some(diff)) = ctx.attempt(Suite::SystemRoundTrip, "system round trip", r, guarded) {
        ctx.finding(
            Suite::SystemRoundTrip,
            Class::Violation,
            "system to distance to system".into(),
            "same saturation".into(),
            diff,
        );
    }
}

fn first_difference(a: &ApproachDistance, b: &ApproachDistance) -> String {
    let n = a.carrier().len();
    let l = a.quantale().lattice();
    for x in 0..n {
        for set in crate::structures::PointSet::all(n) {
            if a.get(x, set) != b.get(x, set) {
                return format!(
                    "at ({}, {}): {} against {}",
                    a.carrier().name(x),
                    a.carrier().set_name(set),
                    l.name(a.get(x, set)),
                    l.name(b.get(x, set))
                );
            }
        }
    }
    "equal".into()
}

fn closed_copies(ctx: &mut Ctx, a: &Analyzer) {
    let copies = ctx.cfg.copies;
    for p in 0..a.space().carrier().len() {
        let both = a.closed_oracle(p, copies).and_then(|x| Ok((x, a.closed_oracle(p, copies + 1)?)));
        let (r, guarded) = axiom_err(both);
        if let Some((x, y)) = ctx.attempt(Suite::ClosedCopies, "closed", r, guarded) {
            if x.holds != y.holds {
                ctx.finding(
                    Suite::ClosedCopies,
                    Class::Divergence,
                    subject(&x),
                    format!("{copies} copies {}", x.holds),
                    format!("{} copies {}", copies + 1, y.holds),
                );
            }
        }
    }
}

fn codomain(ctx: &mut Ctx, a: &Analyzer) {
    let both = a.d_connected_oracle_with(2).and_then(|x| Ok((x, a.d_connected_oracle_with(3)?)));
    let (r, guarded) = axiom_err(both);
    if let Some((x, y)) = ctx.attempt(Suite::Codomain, "d_connected", r, guarded) {
        if x.holds != y.holds {
            ctx.finding(
                Suite::Codomain,
                Class::Divergence,
                "d_connected".into(),
                format!("two points {}", x.holds),
                format!("three points {}", y.holds),
            );
        }
    }
}

fn infimum(ctx: &mut Ctx) {
    let cfg = ctx.cfg;
    let pair = match &ctx.inst.space {
        Space::Gauge(g) => (|| Ok((gauge_to_distance(g, Mode::Base, &cfg.limits)?, gauge_to_distance(g, Mode::Oracle, &cfg.limits)?)))(),
        Space::Distance(d) => (|| {
            let s = distance_to_system(d, &cfg.limits)?;
            Ok((system_to_distance(&s, Mode::Base, &cfg.limits)?, system_to_distance(&s, Mode::Oracle, &cfg.limits)?))
        })(),
        Space::System(s) => (|| Ok((system_to_distance(s, Mode::Base, &cfg.limits)?, system_to_distance(s, Mode::Oracle, &cfg.limits)?)))(),
    };
    // a base infimum that breaks the distance axioms surfaces here as a
    // divergence with the error as its value
    let pair: Result<(ApproachDistance, ApproachDistance), TransitionError> = pair;
    match pair {
        Ok((base, oracle)) => {
            ctx.out.checked(Suite::Infimum);
            if base.values() != oracle.values() {
                ctx.finding(
                    Suite::Infimum,
                    Class::Divergence,
                    "distance from base against saturation".into(),
                    "equal tables".into(),
                    first_difference(&oracle, &base),
                );
            }
        }
        Err(TransitionError::SizeGuard(_)) => ctx.out.skipped(Suite::Infimum),
        Err(e) => {
            ctx.out.checked(Suite::Infimum);
            ctx.finding(
                Suite::Infimum,
                Class::Divergence,
                "distance from base".into(),
                "a valid distance".into(),
                e.to_string(),
            );
        }
    }
}

fn d_connected_readings(ctx: &mut Ctx, a: &Analyzer) {
    let both = a.d_connected().and_then(|x| Ok((x, a.d_connected_literal()?)));
    let (r, guarded) = axiom_err(both);
    if let Some((x, y)) = ctx.attempt(Suite::DConnectedReadings, "d_connected", r, guarded) {
        if x.holds != y.holds {
            ctx.finding(
                Suite::DConnectedReadings,
                Class::Divergence,
                "d_connected".into(),
                format!("every member {}", x.holds),
                format!("some member {}", y.holds),
            );
        }
    }
}

/// Runs the per-instance suites of `cfg` on one instance.
pub fn check_instance(inst: &Instance, cfg: &SweepConfig) -> Outcome {
    let mut ctx = Ctx {
        inst,
        cfg,
        out: Outcome::default(),
        document: None,
    };
    let a = Analyzer::new(inst.space.clone(), cfg.limits);
    if cfg.runs(Suite::Validation) {
        let r = match &inst.space {
            Space::Distance(d) => d.check_axioms().map_err(|e| e.to_string()),
            Space::Gauge(g) => match g.is_locally_directed(&cfg.limits) {
                Ok(true) => Ok(()),
                Ok(false) => Err("base is not locally directed".into()),
                Err(e) => Err(e.to_string()),
            },
            Space::System(_) => Ok(()),
        };
        ctx.attempt(Suite::Validation, "structure axioms", r, false);
    }
    if cfg.runs(Suite::CharOracle) {
        char_oracle(&mut ctx, &a);
    }
    let needs_summary = cfg.runs(Suite::Implications) || cfg.runs(Suite::Presentations);
    if needs_summary {
        let n = inst.space.carrier().len();
        let (r, guarded) = axiom_err(a.full_report(false, cfg.copies).map(|r| r.characterization));
        if let Some(s) = ctx.attempt(Suite::Implications, "characterizations", r, guarded) {
            if cfg.runs(Suite::Implications) {
                implications(&mut ctx, &s, n);
            }
            if cfg.runs(Suite::Presentations) {
                presentations(&mut ctx, &s);
            }
        }
    }
    if cfg.runs(Suite::RoundTrip) {
        round_trip(&mut ctx, &a);
    }
    if cfg.runs(Suite::SystemRoundTrip) {
        if let Space::Distance(d) = &inst.space {
            if d.carrier().len() <= cfg.round_trip_max_carrier && d.quantale().len() <= cfg.round_trip_max_lattice {
                system_round_trip(&mut ctx, d);
            }
        }
    }
    if cfg.runs(Suite::ClosedCopies) {
        closed_copies(&mut ctx, &a);
    }
    if cfg.runs(Suite::Codomain) {
        codomain(&mut ctx, &a);
    }
    if cfg.runs(Suite::Infimum) {
        infimum(&mut ctx);
    }
    if cfg.runs(Suite::DConnectedReadings) {
        d_connected_readings(&mut ctx, &a);
    }
    ctx.out
}

struct Expected {
    name: &'static str,
    text: &'static str,
    t0: &'static [bool],
    t1: &'static [bool],
    closed: &'static [bool],
    d_connected: Option<bool>,
}

const EXAMPLES: [Expected; 2] = [
    Expected {
        name: "t0-not-t1",
        text: T0_NOT_T1,
        t0: &[true, false, false],
        t1: &[false, false, false],
        closed: &[true, false, false],
        d_connected: None,
    },
    Expected {
        name: "d-connected",
        text: D_CONNECTED,
        t0: &[false, false, false],
        t1: &[],
        closed: &[],
        d_connected: Some(true),
    },
];

fn global(suite: Suite, label: &str, subject: &str, expected: String, actual: String, document: Option<String>) -> Finding {
    Finding {
        suite,
        class: Class::Violation,
        label: label.to_string(),
        subject: subject.to_string(),
        expected,
        actual,
        document,
    }
}

/// The shipped examples, the extra documents of the config, and the
/// rejection of meet on M3.
pub fn global_checks(cfg: &SweepConfig) -> Outcome {
    let mut out = Outcome::default();
    if cfg.runs(Suite::Examples) {
        for ex in &EXAMPLES {
            let label = format!("example {}", ex.name);
            let loaded = match load(ex.text, &cfg.limits) {
                Ok(l) => l,
                Err(e) => {
                    out.checked(Suite::Examples);
                    out.report(global(Suite::Examples, &label, "loads", "valid".into(), e.to_string(), Some(ex.text.into())));
                    continue;
                }
            };
            let s = match summary(loaded.space, cfg) {
                Ok(s) => s,
                Err(e) => {
                    out.checked(Suite::Examples);
                    out.report(global(Suite::Examples, &label, "verdicts", "computed".into(), e.to_string(), Some(ex.text.into())));
                    continue;
                }
            };
            let rows = [("t0", ex.t0, &s.t0), ("t1", ex.t1, &s.t1), ("closed", ex.closed, &s.closed)];
            for (name, want, got) in rows {
                for (&w, (p, &g)) in want.iter().zip(got) {
                    out.checked(Suite::Examples);
                    if w != g {
                        out.report(global(Suite::Examples, &label, &format!("{name} at {p}"), w.to_string(), g.to_string(), Some(ex.text.into())));
                    }
                }
            }
            if let Some(w) = ex.d_connected {
                out.checked(Suite::Examples);
                if w != s.d_connected {
                    out.report(global(Suite::Examples, &label, "d_connected", w.to_string(), s.d_connected.to_string(), Some(ex.text.into())));
                }
            }
        }
    }
    if cfg.runs(Suite::Validation) {
        out.checked(Suite::Validation);
        match Quantale::meet(Lattice::m3()) {
            Err(QuantaleError::NotJoinDistributive { .. }) => {}
            other => out.report(global(
                Suite::Validation,
                "M3 with meet",
                "rejected",
                "not join-distributive".into(),
                match other {
                    Ok(_) => "accepted".into(),
                    Err(e) => e.to_string(),
                },
                None,
            )),
        }
        for (name, text) in [("t0-not-t1", T0_NOT_T1), ("d-connected", D_CONNECTED)] {
            out.checked(Suite::Validation);
            let r = load(text, &cfg.limits).map_err(|e| e.to_string()).and_then(|l| match l.space {
                Space::Distance(d) => d.check_axioms().map_err(|e| e.to_string()),
                _ => Err("expected a distance".into()),
            });
            if let Err(e) = r {
                out.report(global(Suite::Validation, &format!("example {name}"), "structure axioms", "valid".into(), e, Some(text.into())));
            }
        }
        for path in &cfg.documents {
            out.checked(Suite::Validation);
            let label = path.display().to_string();
            match std::fs::read_to_string(path) {
                Err(e) => out.report(global(Suite::Validation, &label, "readable", "readable".into(), e.to_string(), None)),
                Ok(text) => match load(&text, &cfg.limits) {
                    Ok(_) => {}
                    Err(e) => {
                        let kind = match e {
                            LoadError::Parse(_) => "parses",
                            LoadError::Invalid(_) => "structure axioms",
                            LoadError::SizeGuard(_) => "within limits",
                        };
                        out.report(global(Suite::Validation, &label, kind, "valid".into(), e.to_string(), Some(text)));
                    }
                },
            }
        }
    }
    out
}
