//! Exhaustive sweeps over small quantales and spaces.
//!
//! A sweep enumerates quantales by family, every approach distance and a
//! capped set of gauges on small carriers, and runs the selected suites on
//! each instance. Instances are checked in parallel and findings are merged
//! in enumeration order, so the output depends on the config alone.

mod enumerate;
mod findings;
mod suites;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_distances, enumerate_gauges, enumerate_tensors};
pub use findings::{read_index, write_findings, FindingRecord, Index};
pub use suites::check_instance;

use crate::axioms::Space;
use crate::limits::Limits;
use crate::quantale::{Lattice, Quantale};
use crate::structures::Carrier;

/// The two example documents shipped with the crate.
pub const T0_NOT_T1: &str = include_str!("../../examples/t0-not-t1.qvt");
pub const D_CONNECTED: &str = include_str!("../../examples/d-connected.qvt");
/// The default sweep.
pub const DEFAULT_CONFIG: &str = include_str!("../../examples/sweep.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Shipped examples reproduce their stated verdicts.
    Examples,
    /// Documents load and structures pass their axioms.
    Validation,
    /// Characterization against oracle, per axiom and point.
    CharOracle,
    /// T1 implies T0, closed iff T0, D-connected excludes T0.
    Implications,
    /// Verdicts agree across the three presentations.
    Presentations,
    /// gauge to distance to gauge, distance to system to distance.
    RoundTrip,
    /// Saturated systems before and after a trip through distances.
    SystemRoundTrip,
    /// Closedness with three against four wedge copies.
    ClosedCopies,
    /// Contractions onto two against three discrete points.
    Codomain,
    /// Base infimum against the infimum over the saturation.
    Infimum,
    /// D-connectedness under the universal and the existential reading.
    DConnectedReadings,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Examples => "examples",
            Suite::Validation => "validation",
            Suite::CharOracle => "char_oracle",
            Suite::Implications => "implications",
            Suite::Presentations => "presentations",
            Suite::RoundTrip => "round_trip",
            Suite::SystemRoundTrip => "system_round_trip",
            Suite::ClosedCopies => "closed_copies",
            Suite::Codomain => "codomain",
            Suite::Infimum => "infimum",
            Suite::DConnectedReadings => "d_connected_readings",
        }
    }

    pub const ALL: [Suite; 11] = [
        Suite::Examples,
        Suite::Validation,
        Suite::CharOracle,
        Suite::Implications,
        Suite::Presentations,
        Suite::RoundTrip,
        Suite::SystemRoundTrip,
        Suite::ClosedCopies,
        Suite::Codomain,
        Suite::Infimum,
        Suite::DConnectedReadings,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Chains of every size up to `max_size` with meet.
    MeetChains { max_size: usize },
    /// Every tensor on chains of every size up to `max_size`.
    TensorChains { max_size: usize },
    /// Every tensor on the four-element Boolean lattice.
    TensorDiamond,
    /// The Boolean diamond with meet and the quantales of the shipped
    /// examples, plus the example spaces themselves.
    Fixtures,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub suites: Vec<Suite>,
    /// Distances are enumerated on carriers up to this size.
    pub max_carrier_size: usize,
    /// Gauges are enumerated on carriers up to this size.
    pub gauge_max_carrier: usize,
    /// Gauge bases are drawn from subsets of at most this many metrics.
    pub gauge_base_size: usize,
    pub gauges_per_carrier: usize,
    /// Skip a carrier when it has more reflexive singleton tables.
    pub singleton_tables: u64,
    pub copies: usize,
    pub round_trip_max_carrier: usize,
    pub round_trip_max_lattice: usize,
    /// Violations and divergences written per suite; summaries count all.
    pub findings_per_suite: usize,
    /// Extra documents, relative to the config file.
    pub documents: Vec<PathBuf>,
    pub output: PathBuf,
    pub limits: Limits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            families: vec![
                Family::MeetChains { max_size: 4 },
                Family::TensorChains { max_size: 3 },
                Family::TensorDiamond,
                Family::Fixtures,
            ],
            suites: Suite::ALL.to_vec(),
            max_carrier_size: 3,
            gauge_max_carrier: 2,
            gauge_base_size: 2,
            gauges_per_carrier: 64,
            singleton_tables: 5000,
            copies: 3,
            round_trip_max_carrier: 2,
            round_trip_max_lattice: 3,
            findings_per_suite: 20,
            documents: Vec::new(),
            output: PathBuf::from("findings"),
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed sweep config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid sweep config: {0}")]
    Invalid(String),
}

impl SweepConfig {
    /// Parses a config; relative paths are taken from `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: SweepConfig = toml::from_str(text)?;
        for d in &mut cfg.documents {
            if d.is_relative() {
                *d = base_dir.join(&*d);
            }
        }
        if cfg.output.is_relative() {
            cfg.output = base_dir.join(&cfg.output);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.families.is_empty() {
            return bad("`families` is empty");
        }
        if self.suites.is_empty() {
            return bad("`suites` is empty");
        }
        for (v, name) in [
            (self.max_carrier_size, "max_carrier_size"),
            (self.gauge_base_size, "gauge_base_size"),
            (self.gauges_per_carrier, "gauges_per_carrier"),
            (self.singleton_tables as usize, "singleton_tables"),
            (self.copies, "copies"),
            (self.findings_per_suite, "findings_per_suite"),
        ] {
            if v == 0 {
                return bad(&format!("`{name}` must be positive"));
            }
        }
        if self.copies < 2 {
            return bad("`copies` must be at least 2");
        }
        if self.max_carrier_size > 6 || self.gauge_max_carrier > 6 {
            return bad("carrier sizes above 6 are out of reach");
        }
        for f in &self.families {
            if let Family::MeetChains { max_size } | Family::TensorChains { max_size } = f {
                if *max_size == 0 {
                    return bad("family `max_size` must be positive");
                }
            }
        }
        Ok(())
    }

    pub fn runs(&self, suite: Suite) -> bool {
        self.suites.contains(&suite)
    }
}

/// One space to check, with a label saying where it came from.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub space: Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Violation,
    Divergence,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub suite: Suite,
    pub class: Class,
    pub label: String,
    pub subject: String,
    pub expected: String,
    pub actual: String,
    /// A loadable document reproducing the finding.
    #[serde(skip)]
    pub document: Option<String>,
}

/// Per-suite counts over a sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: u64,
    pub skipped: u64,
    pub violations: u64,
    pub divergences: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub findings: Vec<Finding>,
    pub tallies: Vec<(Suite, Tally)>,
}

impl Outcome {
    fn tally(&mut self, suite: Suite) -> &mut Tally {
        if let Some(i) = self.tallies.iter().position(|(s, _)| *s == suite) {
            &mut self.tallies[i].1
        } else {
            self.tallies.push((suite, Tally::default()));
            &mut self.tallies.last_mut().expect("pushed").1
        }
    }

    fn checked(&mut self, suite: Suite) {
        self.tally(suite).checked += 1;
    }

    fn skipped(&mut self, suite: Suite) {
        self.tally(suite).skipped += 1;
    }

    fn report(&mut self, finding: Finding) {
        let t = self.tally(finding.suite);
        match finding.class {
            Class::Violation => t.violations += 1,
            Class::Divergence => t.divergences += 1,
            Class::Summary => {}
        }
        self.findings.push(finding);
    }

    fn merge(&mut self, other: Outcome) {
        for (suite, t) in other.tallies {
            let mine = self.tally(suite);
            mine.checked += t.checked;
            mine.skipped += t.skipped;
            mine.violations += t.violations;
            mine.divergences += t.divergences;
        }
        self.findings.extend(other.findings);
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Summaries first, in suite order, then the kept findings in
    /// enumeration order.
    pub findings: Vec<Finding>,
    pub tallies: Vec<(Suite, Tally)>,
    pub instances: usize,
}

impl SweepResult {
    pub fn violations(&self) -> u64 {
        self.tallies.iter().map(|(_, t)| t.violations).sum()
    }

    pub fn tally(&self, suite: Suite) -> Tally {
        self.tallies.iter().find(|(s, _)| *s == suite).map(|(_, t)| *t).unwrap_or_default()
    }
}

/// Quantales of the configured families, first occurrence kept.
pub fn enumerate_quantales(cfg: &SweepConfig) -> Vec<(String, Arc<Quantale>)> {
    let mut out: Vec<(String, Arc<Quantale>)> = Vec::new();
    let mut push = |label: String, q: Quantale| {
        if !out.iter().any(|(_, p)| **p == q) {
            let kind = match (q.is_integral(), q.is_commutative()) {
                (true, true) => "integral",
                (true, false) => "integral, non-commutative",
                (false, true) => "non-integral",
                (false, false) => "non-integral, non-commutative",
            };
            out.push((format!("{label} ({kind})"), Arc::new(q)));
        }
    };
    for f in &cfg.families {
        match f {
            Family::MeetChains { max_size } => {
                for n in 1..=*max_size {
                    push(format!("{n}-chain meet"), Quantale::meet(Lattice::chain_of(n)).expect("chains are distributive"));
                }
            }
            Family::TensorChains { max_size } => {
                for n in 1..=*max_size {
                    let all = enumerate_tensors(&Lattice::chain_of(n), &cfg.limits).unwrap_or_default();
                    for (i, q) in all.into_iter().enumerate() {
                        push(format!("{n}-chain tensor {}", i + 1), q);
                    }
                }
            }
            Family::TensorDiamond => {
                let all = enumerate_tensors(&Lattice::diamond(), &cfg.limits).unwrap_or_default();
                for (i, q) in all.into_iter().enumerate() {
                    push(format!("diamond tensor {}", i + 1), q);
                }
            }
            Family::Fixtures => {
                push("diamond meet".into(), Quantale::meet(Lattice::diamond()).expect("distributive"));
                for (name, text) in [("t0-not-t1", T0_NOT_T1), ("d-connected", D_CONNECTED)] {
                    let loaded = crate::io::load(text, &cfg.limits).expect("shipped example loads");
                    push(format!("{name} quantale"), (**loaded.space.quantale()).clone());
                }
            }
        }
    }
    out
}

fn letters(n: usize) -> Carrier {
    const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
    Carrier::new(&NAMES[..n]).expect("distinct names")
}

/// Instances in enumeration order, with a generation outcome counting the
/// carriers skipped by a cap.
pub fn enumerate_instances(cfg: &SweepConfig) -> (Vec<Instance>, Outcome) {
    let mut out = Vec::new();
    let mut gen = Outcome::default();
    if cfg.families.contains(&Family::Fixtures) {
        for (name, text) in [("t0-not-t1", T0_NOT_T1), ("d-connected", D_CONNECTED)] {
            let loaded = crate::io::load(text, &cfg.limits).expect("shipped example loads");
            out.push(Instance {
                label: format!("example {name}"),
                space: loaded.space,
            });
        }
    }
    for (qlabel, q) in enumerate_quantales(cfg) {
        for n in 1..=cfg.max_carrier_size {
            let c = letters(n);
            match enumerate_distances(&q, &c, cfg.singleton_tables as u128, &cfg.limits) {
                Ok(ds) => out.extend(ds.into_iter().enumerate().map(|(i, d)| Instance {
                    label: format!("{qlabel}, {n} points, distance {}", i + 1),
                    space: Space::Distance(d),
                })),
                Err(_) => gen.skipped(Suite::Validation),
            }
            if n <= cfg.gauge_max_carrier {
                match enumerate_gauges(&q, &c, cfg.gauge_base_size, cfg.gauges_per_carrier, &cfg.limits) {
                    Ok(gs) => out.extend(gs.into_iter().enumerate().map(|(i, g)| Instance {
                        label: format!("{qlabel}, {n} points, gauge {}", i + 1),
                        space: Space::Gauge(g),
                    })),
                    Err(_) => gen.skipped(Suite::Validation),
                }
            }
        }
    }
    (out, gen)
}

/// Runs every configured suite. Extra documents that fail to load become
/// validation violations.
pub fn run_sweep(cfg: &SweepConfig) -> SweepResult {
    let mut total = Outcome::default();
    if cfg.runs(Suite::Validation) || cfg.runs(Suite::Examples) {
        total.merge(suites::global_checks(cfg));
    }
    let (instances, gen) = enumerate_instances(cfg);
    total.merge(gen);
    let outcomes: Vec<Outcome> = instances.par_iter().map(|inst| check_instance(inst, cfg)).collect();
    for o in outcomes {
        total.merge(o);
    }
    let mut tallies = total.tallies;
    tallies.sort_by_key(|(s, _)| *s);
    let mut findings: Vec<Finding> = tallies
        .iter()
        .map(|(suite, t)| Finding {
            suite: *suite,
            class: Class::Summary,
            label: String::new(),
            subject: format!(
                "checked {}, skipped {}, violations {}, divergences {}",
                t.checked, t.skipped, t.violations, t.divergences
            ),
            expected: String::new(),
            actual: if t.violations == 0 { "pass".into() } else { "fail".into() },
            document: None,
        })
        .collect();
    let mut kept: Vec<(Suite, usize)> = Vec::new();
    for f in total.findings {
        let count = match kept.iter_mut().find(|(s, _)| *s == f.suite) {
            Some((_, c)) => c,
            None => {
                kept.push((f.suite, 0));
                &mut kept.last_mut().expect("pushed").1
            }
        };
        if *count < cfg.findings_per_suite {
            *count += 1;
            findings.push(f);
        }
    }
    SweepResult {
        findings,
        tallies,
        instances: instances.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_file_matches_the_default() {
        let cfg = SweepConfig::from_toml(DEFAULT_CONFIG, Path::new("")).unwrap();
        assert_eq!(cfg, SweepConfig::default());
    }

    #[test]
    fn config_rejects_bad_values() {
        assert!(SweepConfig::from_toml("families = []", Path::new("")).is_err());
        assert!(SweepConfig::from_toml("copies = 1", Path::new("")).is_err());
        assert!(SweepConfig::from_toml("colour = 1", Path::new("")).is_err());
        let cfg = SweepConfig::from_toml("documents = [\"x.qvt\"]\noutput = \"out\"", Path::new("/tmp/s")).unwrap();
        assert_eq!(cfg.documents, vec![PathBuf::from("/tmp/s/x.qvt")]);
        assert_eq!(cfg.output, PathBuf::from("/tmp/s/out"));
    }

    #[test]
    fn chains_with_meet() {
        let cfg = SweepConfig {
            families: vec![Family::MeetChains { max_size: 3 }],
            ..SweepConfig::default()
        };
        let qs = enumerate_quantales(&cfg);
        assert_eq!(qs.len(), 3);
        assert!(qs.iter().all(|(_, q)| q.is_meet()));
    }

    #[test]
    fn families_deduplicate() {
        let cfg = SweepConfig {
            families: vec![Family::MeetChains { max_size: 2 }, Family::TensorChains { max_size: 2 }],
            ..SweepConfig::default()
        };
        // the 2-chain carries meet and the zero tensor
        assert_eq!(enumerate_quantales(&cfg).len(), 3);
    }
}
