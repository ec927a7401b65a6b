//! The findings directory: `index.json` plus one document per finding.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Class, Suite, SweepResult};
use crate::io::SCHEMA;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub suite: Suite,
    pub class: Class,
    pub label: String,
    pub subject: String,
    pub expected: String,
    pub actual: String,
    /// File name of the instance document, next to the index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub schema: u32,
    pub instances: usize,
    pub findings: Vec<FindingRecord>,
}

fn is_ours(name: &str) -> bool {
    name == "index.json" || (name.len() == 8 && name.ends_with(".qvt") && name[..4].bytes().all(|b| b.is_ascii_digit()))
}

/// Writes the findings of a sweep to `dir`, replacing an earlier sweep's
/// files.
pub fn write_findings(dir: &Path, result: &SweepResult) -> io::Result<Index> {
    fs::create_dir_all(dir)?;
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_name().to_str().is_some_and(is_ours) {
            fs::remove_file(entry.path())?;
        }
    }
    let mut records = Vec::new();
    let mut next = 1;
    for f in &result.findings {
        let document = match &f.document {
            Some(text) => {
                let name = format!("{next:04}.qvt");
                next += 1;
                let header = format!("# {}: {}\n# {}\n", f.suite.name(), f.subject, f.label);
                fs::write(dir.join(&name), header + text)?;
                Some(name)
            }
            None => None,
        };
        records.push(FindingRecord {
            suite: f.suite,
            class: f.class,
            label: f.label.clone(),
            subject: f.subject.clone(),
            expected: f.expected.clone(),
            actual: f.actual.clone(),
            document,
        });
    }
    let index = Index {
        schema: SCHEMA,
        instances: result.instances,
        findings: records,
    };
    let lines: Vec<String> = index
        .findings
        .iter()
        .map(|r| format!("    {}", crate::io::inline_json(r)))
        .collect();
    let body = format!(
        "{{\n  \"schema\": {},\n  \"instances\": {},\n  \"findings\": [\n{}\n  ]\n}}\n",
        index.schema,
        index.instances,
        lines.join(",\n")
    );
    fs::write(dir.join("index.json"), body)?;
    Ok(index)
}

pub fn read_index(dir: &Path) -> io::Result<Index> {
    let text = fs::read_to_string(dir.join("index.json"))?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}
