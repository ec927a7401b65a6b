//! Verdict reports as text or JSON.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::axioms::{Evidence, Method, Presentation, Report, Summary, Verdict};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Single-line JSON with `", "` and `": "` separators.
struct Inline;

impl Formatter for Inline {
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }
}

pub(crate) fn inline_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Inline);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// The on-disk report: the characterization summary at the top level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: u32,
    pub presentation: Presentation,
    #[serde(flatten)]
    pub characterization: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Summary>,
    pub verdicts: Vec<Verdict>,
}

impl ReportFile {
    pub fn new(presentation: Presentation, report: Report) -> Self {
        ReportFile {
            schema: SCHEMA,
            presentation,
            characterization: report.characterization,
            oracle: report.oracle,
            verdicts: report.verdicts,
        }
    }

    pub fn into_report(self) -> Report {
        Report {
            characterization: self.characterization,
            oracle: self.oracle,
            verdicts: self.verdicts,
        }
    }
}

/// One key per line, each value inline, one verdict per line.
pub fn report_json(presentation: Presentation, report: &Report) -> String {
    let s = &report.characterization;
    let mut lines = vec![
        format!("  \"schema\": {SCHEMA}"),
        format!("  \"presentation\": {}", inline_json(&presentation)),
        format!("  \"t0\": {}", inline_json(&s.t0)),
        format!("  \"t1\": {}", inline_json(&s.t1)),
        format!("  \"closed\": {}", inline_json(&s.closed)),
        format!("  \"d_connected\": {}", s.d_connected),
    ];
    if let Some(o) = &report.oracle {
        lines.push(format!("  \"oracle\": {}", inline_json(o)));
    }
    let verdicts: Vec<String> = report.verdicts.iter().map(|v| format!("    {}", inline_json(v))).collect();
    if verdicts.is_empty() {
        lines.push("  \"verdicts\": []".into());
    } else {
        lines.push(format!("  \"verdicts\": [\n{}\n  ]", verdicts.join(",\n")));
    }
    format!("{{\n{}\n}}\n", lines.join(",\n"))
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report schema {0}, expected {SCHEMA}")]
    Schema(u32),
}

pub fn parse_report(text: &str) -> Result<ReportFile, ReportError> {
    let file: ReportFile = serde_json::from_str(text)?;
    if file.schema != SCHEMA {
        return Err(ReportError::Schema(file.schema));
    }
    Ok(file)
}

fn method_tag(m: Method) -> &'static str {
    match m {
        Method::Characterization => "char",
        Method::Oracle => "oracle",
    }
}

fn evidence_text(e: &Evidence) -> String {
    match e {
        Evidence::Metric { x, y, rows } => {
            let rows: Vec<String> = rows.iter().map(|r| r.join(" ")).collect();
            format!("metric at ({x},{y}) [{}]", rows.join(" | "))
        }
        Evidence::Function { at, y, phi } => format!("function in A({at}) at {y} [{}]", phi.join(" ")),
        Evidence::Values { x, y, forward, backward } => format!("({x},{y}) -> {forward}, ({y},{x}) -> {backward}"),
        Evidence::Pair { x, y } => format!("no witness for ({x},{y})"),
        Evidence::Map { image } => format!("contraction [{}]", image.join(" ")),
        Evidence::Lift { points, base } => format!("lift on {points} points, base of {base}"),
    }
}

/// One line per verdict: `axiom point method holds`, then evidence.
pub fn verdict_line(v: &Verdict) -> String {
    let mut line = format!(
        "{:<11} {:<6} {:<6} {}",
        v.axiom.label(),
        v.point.as_deref().unwrap_or("-"),
        method_tag(v.method),
        v.holds
    );
    if !v.evidence.is_empty() {
        let ev: Vec<String> = v.evidence.iter().map(evidence_text).collect();
        line.push_str("  # ");
        line.push_str(&ev.join("; "));
    }
    line
}

pub fn verdicts_text(verdicts: &[Verdict]) -> String {
    verdicts.iter().map(|v| verdict_line(v) + "\n").collect()
}

/// A JSON array with one verdict per line.
pub fn verdicts_json(verdicts: &[Verdict]) -> String {
    if verdicts.is_empty() {
        return "[]\n".into();
    }
    let lines: Vec<String> = verdicts.iter().map(|v| format!("  {}", inline_json(v))).collect();
    format!("[\n{}\n]\n", lines.join(",\n"))
}

pub fn serialize_report(presentation: Presentation, report: &Report, format: Format) -> String {
    match format {
        Format::Json => report_json(presentation, report),
        Format::Text => {
            let mut out = format!("presentation {}\n", inline_json(&presentation).trim_matches('"'));
            out.push_str(&verdicts_text(&report.verdicts));
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{Analyzer, Axiom};
    use crate::io::load;
    use crate::Limits;

    const EXAMPLE: &str = include_str!("../../examples/t0-not-t1.qvt");

    fn report(with_oracle: bool) -> (Presentation, Report) {
        let loaded = load(EXAMPLE, &Limits::default()).unwrap();
        let p = loaded.space.presentation();
        let a = Analyzer::new(loaded.space, Limits::default());
        (p, a.full_report(with_oracle, 3).unwrap())
    }

    #[test]
    fn json_carries_the_t0_row() {
        let (p, r) = report(false);
        let json = report_json(p, &r);
        assert!(json.contains(r#""t0": {"a": true, "b": false, "c": false}"#), "{json}");
        assert!(json.starts_with("{\n  \"schema\": 1,\n"));
    }

    #[test]
    fn json_round_trips() {
        for with_oracle in [false, true] {
            let (p, r) = report(with_oracle);
            let back = parse_report(&report_json(p, &r)).unwrap();
            assert_eq!(back.presentation, p);
            assert_eq!(back.into_report(), r);
        }
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let (p, r) = report(false);
        let json = report_json(p, &r).replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(parse_report(&json), Err(ReportError::Schema(2))));
    }

    #[test]
    fn text_has_one_line_per_axiom_and_point() {
        let (p, r) = report(false);
        let text = serialize_report(p, &r, Format::Text);
        let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("presentation")).collect();
        assert_eq!(lines.len(), 3 * 3 + 1);
        let t0: Vec<&&str> = lines.iter().filter(|l| l.starts_with(Axiom::T0.label())).collect();
        assert_eq!(t0.len(), 3);
        assert!(t0[0].starts_with("t0          a      char   true"), "{}", t0[0]);
    }
}
