//! Canonical text form of a document.

use std::fmt::Write;

use super::parse::{Name, StructureDecl, StructureDoc};

fn names(list: &[Name]) -> String {
    list.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(" ")
}

/// Prints `doc` so that parsing the result gives `doc` back.
pub fn print_document(doc: &StructureDoc) -> String {
    let mut out = String::new();
    let q = &doc.quantale;
    out.push_str("quantale\n");
    writeln!(out, "  elements: {}", names(&q.elements)).unwrap();
    if let Some(b) = &q.bottom {
        writeln!(out, "  bottom: {}", b.as_str()).unwrap();
    }
    if let Some(t) = &q.top {
        writeln!(out, "  top: {}", t.as_str()).unwrap();
    }
    if !q.leq.is_empty() {
        let chains: Vec<String> = q
            .leq
            .iter()
            .map(|c| c.iter().map(|n| n.as_str()).collect::<Vec<_>>().join("<="))
            .collect();
        writeln!(out, "  leq: {}", chains.join(" ")).unwrap();
    }
    if q.star_meet || !q.star.is_empty() {
        let mut items: Vec<String> = Vec::new();
        if q.star_meet {
            items.push("meet".into());
        }
        items.extend(q.star.iter().map(|[a, b, c]| format!("{}*{}={}", a.as_str(), b.as_str(), c.as_str())));
        writeln!(out, "  star: {}", items.join(" ")).unwrap();
    }
    writeln!(out, "space\n  points: {}", names(&doc.points)).unwrap();
    for m in &doc.metrics {
        writeln!(out, "metric {}", m.name.as_str()).unwrap();
        for (p, values) in &m.rows {
            writeln!(out, "  {}: {}", p.as_str(), names(values)).unwrap();
        }
    }
    for f in &doc.functions {
        writeln!(out, "function {}", f.name.as_str()).unwrap();
        let entries: Vec<String> = f.entries.iter().map(|(p, v)| format!("{}={}", p.as_str(), v.as_str())).collect();
        if !entries.is_empty() {
            writeln!(out, "  {}", entries.join(" ")).unwrap();
        }
    }
    match &doc.structure.value {
        StructureDecl::Gauge { base } => {
            writeln!(out, "gauge\n  base: {}", names(base)).unwrap();
        }
        StructureDecl::Distance { entries } => {
            out.push_str("distance\n");
            for e in entries {
                let set: Vec<&str> = e.set.iter().map(|n| n.as_str()).collect();
                writeln!(out, "  delta {} {{{}}} = {}", e.x.as_str(), set.join(","), e.value.as_str()).unwrap();
            }
        }
        StructureDecl::System { at } => {
            out.push_str("system\n");
            for (p, fs) in at {
                writeln!(out, "  at {}: {}", p.as_str(), names(fs)).unwrap();
            }
        }
    }
    out
}
