//! Reader and writer for the `.dtree` text format.
//!
//! ```text
//! # Fig. 1 style: one snapshot per braced block
//! {[when=1] 10 -> {5 -> {2, 7 -> 6}, 15 -> 12}}
//! {[when=2] 10 -> {5 -> {2, 7 -> 6}, 15}}
//! ```
//!
//! A bare `a -> b` puts `b` in slot 1, `a -> {, b}` leaves slot 1 empty.
//! Integer `when` values are indices mapped to `(i - 1) * 2` seconds,
//! `when=1.5s` gives literal seconds. Nodes may carry `[width=.., height=..]`;
//! other bracket keys are accepted and reported as warnings. A trailing `'`
//! marks a renamed (cut) node generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{
    is_name_char, validate, DynamicTree, Extent, ModelError, NodeId, Slot, Snapshot, StructureError,
};

/// Seconds between consecutive integer `when` indices.
pub const DEFAULT_STEP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourceSpan {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: expected {}, found {found}", expected.join(" or "))]
    Unexpected {
        span: SourceSpan,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("{span}: unexpected character {ch:?}")]
    BadChar { span: SourceSpan, ch: char },
    #[error("{span}: snapshot has no `when` key")]
    MissingWhen { span: SourceSpan },
    #[error("{span}: invalid `when` value {value:?}")]
    BadWhen { span: SourceSpan, value: String },
    #[error("{span}: `when` {time}s repeats an earlier snapshot")]
    DuplicateWhen { span: SourceSpan, time: f64 },
    #[error("{span}: `when` {time}s is earlier than the previous snapshot")]
    NonMonotonicWhen { span: SourceSpan, time: f64 },
    #[error("{span}: integer indices and literal seconds cannot be mixed")]
    MixedWhenUnits { span: SourceSpan },
    #[error("{span}: invalid value {value:?} for `{key}`")]
    BadOption {
        span: SourceSpan,
        key: String,
        value: String,
    },
    #[error("{span}: {source}")]
    Structure {
        span: SourceSpan,
        #[source]
        source: StructureError,
    },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Unexpected { span, .. }
            | ParseError::BadChar { span, .. }
            | ParseError::MissingWhen { span }
            | ParseError::BadWhen { span, .. }
            | ParseError::DuplicateWhen { span, .. }
            | ParseError::NonMonotonicWhen { span, .. }
            | ParseError::MixedWhenUnits { span }
            | ParseError::BadOption { span, .. }
            | ParseError::Structure { span, .. } => *span,
        }
    }
}

/// Non-fatal remark, e.g. an ignored bracket key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Arrow,
    Eq,
    Prime,
    Word(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Prime => "`'`".into(),
            Tok::Word(w) => format!("`{w}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.char_indices().peekable();
    while let Some(&(off, c)) = chars.peek() {
        let span = SourceSpan {
            line,
            column: col,
            offset: off,
        };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::CharIndices>| {
            let (_, c) = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            '\'' => Some(Tok::Prime),
            _ => None,
        };
        if let Some(tok) = single {
            bump(&mut chars);
            out.push((tok, span));
        } else if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                bump(&mut chars);
            }
        } else if c == '-' {
            bump(&mut chars);
            if chars.peek().map(|&(_, c)| c) == Some('>') {
                bump(&mut chars);
                out.push((Tok::Arrow, span));
            } else {
                return Err(ParseError::BadChar { span, ch: '-' });
            }
        } else if is_name_char(c) {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !is_name_char(c) {
                    break;
                }
                word.push(c);
                bump(&mut chars);
            }
            out.push((Tok::Word(word), span));
        } else {
            return Err(ParseError::BadChar { span, ch: c });
        }
    }
    let end = SourceSpan {
        line,
        column: col,
        offset: text.len(),
    };
    out.push((Tok::Eof, end));
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WhenUnit {
    Index,
    Seconds,
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    warnings: Vec<Warning>,
}

/// Per-snapshot accumulator.
#[derive(Default)]
struct SnapshotParts {
    roots: Vec<NodeId>,
    children: BTreeMap<NodeId, Vec<Slot>>,
    annotations: BTreeMap<NodeId, Extent>,
    seen: BTreeSet<NodeId>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Unexpected {
            span: self.span(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.unexpected(vec![what]))
        }
    }

    fn word(&mut self, what: &'static str) -> Result<(String, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let span = self.next().1;
                Ok((w, span))
            }
            _ => Err(self.unexpected(vec![what])),
        }
    }

    fn document(&mut self) -> Result<DynamicTree, ParseError> {
        let mut snapshots: Vec<Snapshot> = Vec::new();
        let mut unit: Option<WhenUnit> = None;
        loop {
            let start = self.expect(Tok::LBrace, "`{`")?;
            let (time, this_unit, when_span) = self.header(start)?;
            match unit {
                Some(u) if u != this_unit => {
                    return Err(ParseError::MixedWhenUnits { span: when_span })
                }
                _ => unit = Some(this_unit),
            }
            if let Some(prev) = snapshots.last() {
                if time == prev.time() {
                    return Err(ParseError::DuplicateWhen {
                        span: when_span,
                        time,
                    });
                }
                if time < prev.time() {
                    return Err(ParseError::NonMonotonicWhen {
                        span: when_span,
                        time,
                    });
                }
            }
            let mut parts = SnapshotParts::default();
            self.forest(&mut parts)?;
            self.expect(Tok::RBrace, "`}`")?;
            let snap = Snapshot::new(
                snapshots.len() + 1,
                time,
                parts.roots,
                parts.children,
                parts.annotations,
            );
            validate(&snap).map_err(|source| ParseError::Structure {
                span: start,
                source,
            })?;
            snapshots.push(snap);
            while matches!(self.peek(), Tok::Comma | Tok::Semi) {
                self.next();
            }
            if *self.peek() == Tok::Eof {
                break;
            }
        }
        DynamicTree::new(snapshots).map_err(|e| match e {
            ModelError::Structure { source, .. } => ParseError::Structure {
                span: SourceSpan::default(),
                source,
            },
            other => unreachable!("checked while parsing: {other}"),
        })
    }

    fn header(&mut self, start: SourceSpan) -> Result<(f64, WhenUnit, SourceSpan), ParseError> {
        if *self.peek() != Tok::LBracket {
            return Err(ParseError::MissingWhen { span: start });
        }
        let opts = self.options()?;
        let mut when = None;
        for opt in opts {
            if opt.key == "when" && when.is_none() {
                when = Some((opt.value, opt.span));
            } else {
                self.warnings.push(Warning {
                    span: opt.span,
                    message: format!("ignored snapshot option `{}`", opt.key),
                });
            }
        }
        let (value, span) = when.ok_or(ParseError::MissingWhen { span: start })?;
        let value = value.unwrap_or_default();
        let bad = || ParseError::BadWhen {
            span,
            value: value.clone(),
        };
        if !value.is_empty() && value.bytes().all(|b| b.is_ascii_digit()) {
            let i: u64 = value.parse().map_err(|_| bad())?;
            if i == 0 {
                return Err(bad());
            }
            Ok(((i - 1) as f64 * DEFAULT_STEP, WhenUnit::Index, span))
        } else if let Some(num) = value.strip_suffix('s') {
            let well_formed = !num.is_empty()
                && num.bytes().all(|b| b.is_ascii_digit() || b == b'.')
                && num.bytes().filter(|&b| b == b'.').count() <= 1
                && num != ".";
            if !well_formed {
                return Err(bad());
            }
            let secs: f64 = num.parse().map_err(|_| bad())?;
            Ok((secs, WhenUnit::Seconds, span))
        } else {
            Err(bad())
        }
    }

    /// `[key=value, key words, ...]`
    fn options(&mut self) -> Result<Vec<Opt>, ParseError> {
        self.expect(Tok::LBracket, "`[`")?;
        let mut out = Vec::new();
        if *self.peek() == Tok::RBracket {
            self.next();
            return Ok(out);
        }
        loop {
            let (mut key, span) = self.word("option name")?;
            while let Tok::Word(w) = self.peek().clone() {
                self.next();
                key.push(' ');
                key.push_str(&w);
            }
            let value = if *self.peek() == Tok::Eq {
                self.next();
                let mut v = String::new();
                while let Tok::Word(w) = self.peek().clone() {
                    self.next();
                    if !v.is_empty() {
                        v.push(' ');
                    }
                    v.push_str(&w);
                }
                Some(v)
            } else {
                None
            };
            out.push(Opt { key, value, span });
            match self.peek() {
                Tok::Comma => {
                    self.next();
                }
                Tok::RBracket => {
                    self.next();
                    return Ok(out);
                }
                _ => return Err(self.unexpected(vec!["`,`", "`]`"])),
            }
        }
    }

    fn forest(&mut self, parts: &mut SnapshotParts) -> Result<(), ParseError> {
        loop {
            let root = self.tree(parts)?;
            parts.roots.push(root);
            if *self.peek() == Tok::Comma {
                self.next();
            } else {
                return Ok(());
            }
        }
    }

    fn tree(&mut self, parts: &mut SnapshotParts) -> Result<NodeId, ParseError> {
        let node = self.node(parts)?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let slots = if *self.peek() == Tok::LBrace {
                self.next();
                let mut slots = Vec::new();
                loop {
                    match self.peek() {
                        Tok::Comma | Tok::RBrace => slots.push(Slot::Empty),
                        _ => slots.push(Slot::Occupied(self.tree(parts)?)),
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::RBrace => {
                            self.next();
                            break;
                        }
                        _ => return Err(self.unexpected(vec!["`,`", "`}`"])),
                    }
                }
                slots
            } else {
                vec![Slot::Occupied(self.tree(parts)?)]
            };
            parts.children.insert(node.clone(), slots);
        }
        Ok(node)
    }

    fn node(&mut self, parts: &mut SnapshotParts) -> Result<NodeId, ParseError> {
        let (name, span) = self.word("node name")?;
        let mut generation = 0;
        while *self.peek() == Tok::Prime {
            self.next();
            generation += 1;
        }
        let id = NodeId::with_generation(name, generation);
        if !parts.seen.insert(id.clone()) {
            return Err(ParseError::Structure {
                span,
                source: StructureError::DuplicateParent(id),
            });
        }
        if *self.peek() == Tok::LBracket {
            let mut extent = Extent::default();
            let mut sized = false;
            for opt in self.options()? {
                let target = match opt.key.as_str() {
                    "width" => &mut extent.width,
                    "height" => &mut extent.height,
                    _ => {
                        self.warnings.push(Warning {
                            span: opt.span,
                            message: format!("ignored node option `{}` on {id}", opt.key),
                        });
                        continue;
                    }
                };
                let raw = opt.value.clone().unwrap_or_default();
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() && v > 0.0 => {
                        *target = v;
                        sized = true;
                    }
                    _ => {
                        return Err(ParseError::BadOption {
                            span: opt.span,
                            key: opt.key,
                            value: raw,
                        })
                    }
                }
            }
            if sized {
                parts.annotations.insert(id.clone(), extent);
            }
        }
        Ok(id)
    }
}

struct Opt {
    key: String,
    value: Option<String>,
    span: SourceSpan,
}

/// Parses a `.dtree` document.
pub fn parse_document(text: &str) -> Result<DynamicTree, ParseError> {
    parse_document_with_warnings(text).map(|(t, _)| t)
}

/// Like [`parse_document`] but also returns warnings about ignored options.
pub fn parse_document_with_warnings(text: &str) -> Result<(DynamicTree, Vec<Warning>), ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        warnings: Vec::new(),
    };
    let t = p.document()?;
    Ok((t, p.warnings))
}

/// Canonical text form: one snapshot per line, literal seconds.
pub fn format_document(t: &DynamicTree) -> String {
    let mut out = String::new();
    for s in t.snapshots() {
        write!(out, "{{[when={}s] ", s.time()).unwrap();
        for (i, r) in s.roots().iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            format_tree(s, r, &mut out);
        }
        out.push_str("}\n");
    }
    out
}

fn format_tree(s: &Snapshot, n: &NodeId, out: &mut String) {
    write!(out, "{n}").unwrap();
    if let Some(e) = s.annotations().get(n) {
        write!(out, "[width={}, height={}]", e.width, e.height).unwrap();
    }
    let slots = s.slots(n);
    match slots {
        [] => {}
        [Slot::Occupied(c)] => {
            out.push_str(" -> ");
            format_tree(s, c, out);
        }
        _ => {
            out.push_str(" -> {");
            for (i, slot) in slots.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Slot::Occupied(c) = slot {
                    if i > 0 {
                        out.push(' ');
                    }
                    format_tree(s, c, out);
                }
            }
            out.push('}');
        }
    }
}
