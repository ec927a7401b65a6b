//! The declaration format, its diagnostics, and verdict reports.

mod build;
mod parse;
mod print;
mod report;

pub use build::{build, document_of, load, LoadError, Loaded};
pub use parse::{
    parse_document, DeltaEntry, Diagnostic, FunctionDecl, MetricDecl, Name, QuantaleDecl, Severity, Span, Spanned,
    StructureDecl, StructureDoc,
};
pub use print::print_document;
pub(crate) use report::inline_json;
pub use report::{
    parse_report, report_json, serialize_report, verdict_line, verdicts_json, verdicts_text, Format, ReportError, ReportFile, SCHEMA,
};
