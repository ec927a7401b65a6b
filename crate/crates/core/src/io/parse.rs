//! Lexer and parser for structure documents.

use std::fmt;

/// 1-based line and column, length in characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
    pub len: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A value with its source position. Equality ignores the position.
#[derive(Debug, Clone, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }

    pub fn bare(value: T) -> Self {
        Spanned {
            value,
            span: Span::default(),
        }
    }
}

impl Spanned<String> {
    pub fn as_str(&self) -> &str {
        &self.value
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    pub hint: Option<String>,
}

impl Diagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            message: message.into(),
            span,
            hint: None,
        }
    }

    pub fn with_hint(mut self, hint: impl Into<String>) -> Self {
        self.hint = Some(hint.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {level}: {}", self.span, self.message)?;
        if let Some(h) = &self.hint {
            write!(f, " (hint: {h})")?;
        }
        Ok(())
    }
}

pub type Name = Spanned<String>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuantaleDecl {
    pub elements: Vec<Name>,
    pub bottom: Option<Name>,
    pub top: Option<Name>,
    /// Each chain `a<=b<=c` as written.
    pub leq: Vec<Vec<Name>>,
    pub star_meet: bool,
    /// Entries `a*b=c`.
    pub star: Vec<[Name; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricDecl {
    pub name: Name,
    /// `point: values...`
    pub rows: Vec<(Name, Vec<Name>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: Name,
    /// `point=value`
    pub entries: Vec<(Name, Name)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEntry {
    pub x: Name,
    pub set: Vec<Name>,
    pub value: Name,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructureDecl {
    Gauge { base: Vec<Name> },
    Distance { entries: Vec<DeltaEntry> },
    System { at: Vec<(Name, Vec<Name>)> },
}

/// A parsed document, before any name resolution or validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureDoc {
    pub quantale: QuantaleDecl,
    pub points: Vec<Name>,
    pub metrics: Vec<MetricDecl>,
    pub functions: Vec<FunctionDecl>,
    /// Positioned at the section header.
    pub structure: Spanned<StructureDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LBrace,
    RBrace,
    Comma,
    Eq,
    Colon,
    Leq,
    Star,
    /// A character outside the grammar.
    Stray(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !"{},=:#<*".contains(c)
}

fn lex_line(line: &str, line_no: usize) -> Vec<Token> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = |len: usize| Span {
            line: line_no,
            col: i + 1,
            len,
        };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let (tok, len) = match c {
            '{' => (Tok::LBrace, 1),
            '}' => (Tok::RBrace, 1),
            ',' => (Tok::Comma, 1),
            '=' => (Tok::Eq, 1),
            ':' => (Tok::Colon, 1),
            '*' => (Tok::Star, 1),
            '<' if chars.get(i + 1) == Some(&'=') => (Tok::Leq, 2),
            '<' => (Tok::Stray('<'), 1),
            _ => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                (Tok::Ident(chars[start..j].iter().collect()), j - start)
            }
        };
        out.push(Token { tok, span: span(len) });
        i += len;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Quantale,
    Space,
    Distance,
    Gauge,
    System,
    Metric,
    Function,
}

const SECTION_WORDS: [&str; 7] = ["quantale", "space", "distance", "gauge", "system", "metric", "function"];

struct Parser {
    diags: Vec<Diagnostic>,
    quantale: QuantaleDecl,
    quantale_seen: Option<Span>,
    points: Vec<Name>,
    space_seen: Option<Span>,
    metrics: Vec<MetricDecl>,
    functions: Vec<FunctionDecl>,
    structures: Vec<(Span, StructureDecl)>,
    section: Section,
    /// The last `key:` seen in the quantale or space section, for
    /// continuation lines.
    key: Option<String>,
}

fn name_of(t: &Token) -> Option<Name> {
    match &t.tok {
        Tok::Ident(s) => Some(Spanned::new(s.clone(), t.span)),
        _ => None,
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Colon => "`:`".into(),
        Tok::Leq => "`<=`".into(),
        Tok::Star => "`*`".into(),
        Tok::Stray(c) => format!("`{c}`"),
    }
}

impl Parser {
    fn new() -> Self {
        Parser {
            diags: Vec::new(),
            quantale: QuantaleDecl::default(),
            quantale_seen: None,
            points: Vec::new(),
            space_seen: None,
            metrics: Vec::new(),
            functions: Vec::new(),
            structures: Vec::new(),
            section: Section::None,
            key: None,
        }
    }

    fn unexpected(&mut self, t: &Token, expected: &str) {
        self.diags.push(Diagnostic::error(
            t.span,
            format!("unexpected {}, expected {expected}", describe(&t.tok)),
        ));
    }

    fn line(&mut self, toks: Vec<Token>) {
        let Some(first) = toks.first() else {
            return;
        };
        if let Tok::Ident(word) = &first.tok {
            // a point or element may share a section word, so headers are
            // recognized by shape
            let named = matches!(word.as_str(), "metric" | "function");
            let shaped = toks.len() == 1 || (named && matches!(toks[1].tok, Tok::Ident(_)));
            if SECTION_WORDS.contains(&word.as_str()) && shaped {
                self.header(&toks);
                return;
            }
        }
        match self.section {
            Section::None => {
                let t = toks[0].clone();
                self.diags.push(
                    Diagnostic::error(t.span, "content before any section header")
                        .with_hint("start with `quantale`"),
                );
            }
            Section::Quantale | Section::Space => self.keyed(&toks),
            Section::Metric => self.metric_row(&toks),
            Section::Function => self.function_row(&toks),
            Section::Gauge => self.gauge_row(&toks),
            Section::Distance => self.delta_row(&toks),
            Section::System => self.system_row(&toks),
        }
    }

    fn header(&mut self, toks: &[Token]) {
        let Tok::Ident(word) = &toks[0].tok else { unreachable!() };
        let span = toks[0].span;
        let named = matches!(word.as_str(), "metric" | "function");
        let expect_len = if named { 2 } else { 1 };
        if named {
            match toks.get(1).and_then(name_of) {
                Some(_) => {}
                None => {
                    self.diags
                        .push(Diagnostic::error(span, format!("`{word}` needs a name")).with_hint(format!("`{word} NAME`")));
                    self.section = Section::None;
                    return;
                }
            }
        }
        if let Some(extra) = toks.get(expect_len) {
            let extra = extra.clone();
            self.unexpected(&extra, "end of line after section header");
        }
        self.key = None;
        self.section = match word.as_str() {
            "quantale" => {
                if let Some(prev) = self.quantale_seen {
                    self.diags.push(Diagnostic::error(
                        span,
                        format!("second `quantale` section; the first is at {prev}"),
                    ));
                }
                self.quantale_seen = Some(span);
                Section::Quantale
            }
            "space" => {
                if let Some(prev) = self.space_seen {
                    self.diags
                        .push(Diagnostic::error(span, format!("second `space` section; the first is at {prev}")));
                }
                self.space_seen = Some(span);
                Section::Space
            }
            "distance" => {
                self.structures.push((span, StructureDecl::Distance { entries: vec![] }));
                Section::Distance
            }
            "gauge" => {
                self.structures.push((span, StructureDecl::Gauge { base: vec![] }));
                Section::Gauge
            }
            "system" => {
                self.structures.push((span, StructureDecl::System { at: vec![] }));
                Section::System
            }
            "metric" => {
                let name = name_of(&toks[1]).expect("checked");
                self.metrics.push(MetricDecl { name, rows: vec![] });
                Section::Metric
            }
            "function" => {
                let name = name_of(&toks[1]).expect("checked");
                self.functions.push(FunctionDecl { name, entries: vec![] });
                Section::Function
            }
            _ => unreachable!(),
        };
    }

    /// `key: items key: items ...`, or items continuing the previous key.
    fn keyed(&mut self, toks: &[Token]) {
        let mut i = 0;
        while i < toks.len() {
            if let (Tok::Ident(k), Some(Tok::Colon)) = (&toks[i].tok, toks.get(i + 1).map(|t| &t.tok)) {
                let valid: &[&str] = if self.section == Section::Quantale {
                    &["elements", "bottom", "top", "leq", "star"]
                } else {
                    &["points"]
                };
                if valid.contains(&k.as_str()) {
                    self.key = Some(k.clone());
                } else {
                    self.diags.push(
                        Diagnostic::error(toks[i].span, format!("unknown key `{k}`"))
                            .with_hint(format!("expected one of: {}", valid.join(", "))),
                    );
                    self.key = None;
                }
                i += 2;
                continue;
            }
            let Some(key) = self.key.clone() else {
                let t = toks[i].clone();
                self.unexpected(&t, "a `key:`");
                // skip to the next key
                i += 1;
                while i < toks.len() && !(matches!(toks[i].tok, Tok::Ident(_)) && matches!(toks.get(i + 1).map(|t| &t.tok), Some(Tok::Colon))) {
                    i += 1;
                }
                continue;
            };
            i = self.item(&key, toks, i);
        }
    }

    /// Consumes one item for `key` starting at `toks[i]`; returns the next
    /// index.
    fn item(&mut self, key: &str, toks: &[Token], i: usize) -> usize {
        let t = &toks[i];
        let Some(first) = name_of(t) else {
            let t = t.clone();
            self.unexpected(&t, "a name");
            return i + 1;
        };
        match key {
            "elements" => {
                self.quantale.elements.push(first);
                i + 1
            }
            "points" => {
                self.points.push(first);
                i + 1
            }
            "bottom" | "top" => {
                let slot = if key == "bottom" { &mut self.quantale.bottom } else { &mut self.quantale.top };
                if slot.is_some() {
                    self.diags
                        .push(Diagnostic::error(first.span, format!("`{key}` given more than once")));
                } else {
                    *slot = Some(first);
                }
                i + 1
            }
            "leq" => {
                let mut chain = vec![first];
                let mut j = i + 1;
                while j < toks.len() && toks[j].tok == Tok::Leq {
                    match toks.get(j + 1).and_then(name_of) {
                        Some(n) => chain.push(n),
                        None => {
                            self.diags
                                .push(Diagnostic::error(toks[j].span, "`<=` must be followed by an element"));
                            return j + 1;
                        }
                    }
                    j += 2;
                }
                if chain.len() < 2 {
                    self.diags.push(
                        Diagnostic::error(chain[0].span, "order entry needs `<=`").with_hint("write `a<=b`"),
                    );
                } else {
                    self.quantale.leq.push(chain);
                }
                j
            }
            "star" => {
                if first.value == "meet" && toks.get(i + 1).map(|t| &t.tok) != Some(&Tok::Star) {
                    self.quantale.star_meet = true;
                    return i + 1;
                }
                let shape = (
                    toks.get(i + 1).map(|t| &t.tok),
                    toks.get(i + 2).and_then(name_of),
                    toks.get(i + 3).map(|t| &t.tok),
                    toks.get(i + 4).and_then(name_of),
                );
                match shape {
                    (Some(Tok::Star), Some(b), Some(Tok::Eq), Some(c)) => {
                        self.quantale.star.push([first, b, c]);
                        i + 5
                    }
                    _ => {
                        self.diags.push(
                            Diagnostic::error(first.span, "malformed tensor entry").with_hint("write `a*b=c` or `meet`"),
                        );
                        let mut j = i + 1;
                        while j < toks.len() && !matches!(toks[j].tok, Tok::Ident(_)) {
                            j += 1;
                        }
                        j.max(i + 1)
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    fn metric_row(&mut self, toks: &[Token]) {
        match (toks.first().and_then(name_of), toks.get(1).map(|t| &t.tok)) {
            (Some(point), Some(Tok::Colon)) => {
                let mut values = Vec::new();
                for t in &toks[2..] {
                    match name_of(t) {
                        Some(v) => values.push(v),
                        None => {
                            let t = t.clone();
                            self.unexpected(&t, "an element");
                        }
                    }
                }
                self.metrics.last_mut().expect("in metric section").rows.push((point, values));
            }
            _ => {
                self.diags.push(
                    Diagnostic::error(toks[0].span, "malformed metric row").with_hint("write `point: v1 v2 ...`"),
                );
            }
        }
    }

    fn function_row(&mut self, toks: &[Token]) {
        let mut i = 0;
        while i < toks.len() {
            match (
                name_of(&toks[i]),
                toks.get(i + 1).map(|t| &t.tok),
                toks.get(i + 2).and_then(name_of),
            ) {
                (Some(p), Some(Tok::Eq), Some(v)) => {
                    self.functions.last_mut().expect("in function section").entries.push((p, v));
                    i += 3;
                }
                _ => {
                    self.diags.push(
                        Diagnostic::error(toks[i].span, "malformed function entry").with_hint("write `point=value`"),
                    );
                    return;
                }
            }
        }
    }

    fn gauge_row(&mut self, toks: &[Token]) {
        let (Some(StructureDecl::Gauge { base }), true) = (
            self.structures.last_mut().map(|(_, s)| s),
            matches!((&toks[0].tok, toks.get(1).map(|t| &t.tok)), (Tok::Ident(k), Some(Tok::Colon)) if k == "base"),
        ) else {
            self.diags
                .push(Diagnostic::error(toks[0].span, "malformed gauge entry").with_hint("write `base: d1 d2 ...`"));
            return;
        };
        let mut bad = Vec::new();
        for t in &toks[2..] {
            match name_of(t) {
                Some(n) => base.push(n),
                None => bad.push(t.clone()),
            }
        }
        for t in bad {
            self.unexpected(&t, "a metric name");
        }
    }

    fn delta_row(&mut self, toks: &[Token]) {
        let malformed = |span: Span| {
            Diagnostic::error(span, "malformed distance entry").with_hint("write `delta x {a,b} = v`")
        };
        if !matches!(&toks[0].tok, Tok::Ident(k) if k == "delta") {
            self.diags.push(malformed(toks[0].span));
            return;
        }
        let Some(x) = toks.get(1).and_then(name_of) else {
            self.diags.push(malformed(toks[0].span));
            return;
        };
        if toks.get(2).map(|t| &t.tok) != Some(&Tok::LBrace) {
            self.diags.push(malformed(toks.get(2).map_or(toks[0].span, |t| t.span)));
            return;
        }
        let mut set = Vec::new();
        let mut i = 3;
        let mut expect_name = true;
        loop {
            let Some(t) = toks.get(i) else {
                self.diags.push(Diagnostic::error(toks[2].span, "unclosed `{`"));
                return;
            };
            match (&t.tok, expect_name) {
                (Tok::RBrace, _) if set.is_empty() || !expect_name => break,
                (Tok::Ident(_), true) => {
                    set.push(name_of(t).expect("ident"));
                    expect_name = false;
                }
                (Tok::Comma, false) => expect_name = true,
                _ => {
                    let t = t.clone();
                    self.unexpected(&t, if expect_name { "a point" } else { "`,` or `}`" });
                    return;
                }
            }
            i += 1;
        }
        match (toks.get(i + 1).map(|t| &t.tok), toks.get(i + 2).and_then(name_of)) {
            (Some(Tok::Eq), Some(value)) => {
                if let Some(extra) = toks.get(i + 3) {
                    let extra = extra.clone();
                    self.unexpected(&extra, "end of line");
                }
                if let Some((_, StructureDecl::Distance { entries })) = self.structures.last_mut() {
                    entries.push(DeltaEntry { x, set, value });
                }
            }
            _ => self.diags.push(malformed(toks.get(i).map_or(toks[0].span, |t| t.span))),
        }
    }

    fn system_row(&mut self, toks: &[Token]) {
        let shape = (
            &toks[0].tok,
            toks.get(1).and_then(name_of),
            toks.get(2).map(|t| &t.tok),
        );
        let (Tok::Ident(k), Some(point), Some(Tok::Colon)) = shape else {
            self.diags
                .push(Diagnostic::error(toks[0].span, "malformed system entry").with_hint("write `at x: f g ...`"));
            return;
        };
        if k != "at" {
            self.diags
                .push(Diagnostic::error(toks[0].span, "malformed system entry").with_hint("write `at x: f g ...`"));
            return;
        }
        let mut names = Vec::new();
        for t in &toks[3..] {
            match name_of(t) {
                Some(n) => names.push(n),
                None => {
                    let t = t.clone();
                    self.unexpected(&t, "a function name");
                }
            }
        }
        if let Some((_, StructureDecl::System { at })) = self.structures.last_mut() {
            at.push((point, names));
        }
    }

    fn finish(mut self) -> Result<StructureDoc, Vec<Diagnostic>> {
        let end = Span { line: 1, col: 1, len: 0 };
        if self.quantale_seen.is_none() {
            self.diags.push(Diagnostic::error(end, "missing `quantale` section"));
        }
        if self.space_seen.is_none() {
            self.diags.push(Diagnostic::error(end, "missing `space` section"));
        }
        if self.structures.len() != 1 {
            let span = self.structures.get(1).map_or(end, |(s, _)| *s);
            self.diags.push(
                Diagnostic::error(span, format!("exactly one structure section is required, found {}", self.structures.len()))
                    .with_hint("use one of `distance`, `gauge`, `system`"),
            );
        }
        if !self.diags.is_empty() {
            return Err(self.diags);
        }
        Ok(StructureDoc {
            quantale: self.quantale,
            points: self.points,
            metrics: self.metrics,
            functions: self.functions,
            structure: {
                let (span, decl) = self.structures.pop().expect("one structure");
                Spanned::new(decl, span)
            },
        })
    }
}

/// Parses a document. All syntax errors are reported, each with a span.
pub fn parse_document(text: &str) -> Result<StructureDoc, Vec<Diagnostic>> {
    let mut p = Parser::new();
    for (i, line) in text.lines().enumerate() {
        let toks = lex_line(line, i + 1);
        for t in &toks {
            if let Tok::Stray(c) = t.tok {
                p.diags.push(Diagnostic::error(t.span, format!("unexpected character `{c}`")));
            }
        }
        let toks: Vec<Token> = toks.into_iter().filter(|t| !matches!(t.tok, Tok::Stray(_))).collect();
        p.line(toks);
    }
    p.finish()
}
