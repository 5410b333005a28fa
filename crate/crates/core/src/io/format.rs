//! The `.netmod` text format.
//!
//! ```text
//! # comment
//! module Baker
//! place ready "ready"
//! trans bake "bake"
//! arc ready -> bake
//! left
//! right busy free
//! ```
//!
//! Ids match `[A-Za-z0-9_]+`; labels are double-quoted UTF-8 with `\"` and
//! `\\` escapes. `left`/`right` list the interface in order and may appear
//! at most once each.

use std::collections::HashMap;
use std::fmt::{self, Write};

use thiserror::Error;

use crate::label::Kind;
use crate::module::{is_valid_id, Element, NetModule, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("dangling reference to undeclared id {0}")]
    DanglingReference(String),
    #[error("bipartiteness: arc {0} -> {1} connects two elements of the same kind")]
    Bipartiteness(String, String),
    #[error("{0}")]
    Invalid(String),
}

impl ParseErrorKind {
    pub fn rule(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax(_) => "syntax",
            ParseErrorKind::DuplicateId(_) => "duplicate id",
            ParseErrorKind::DanglingReference(_) => "dangling reference",
            ParseErrorKind::Bipartiteness(..) => "bipartiteness",
            ParseErrorKind::Invalid(_) => "invalid module",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDocument {
    pub name: String,
    pub module: NetModule,
    /// Declaration site of every element id.
    pub spans: HashMap<String, Span>,
}

struct Token<'a> {
    text: TokenText<'a>,
    column: usize,
}

enum TokenText<'a> {
    Word(&'a str),
    Quoted(String),
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    let err = |column: usize, msg: &str| ParseError {
        span: Span { line: line_no, column },
        kind: ParseErrorKind::Syntax(msg.to_owned()),
    };
    while let Some(&(i, c)) = chars.peek() {
        let column = line[..i].chars().count() + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '"' {
            chars.next();
            let mut s = String::new();
            let mut closed = false;
            while let Some((_, c)) = chars.next() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match chars.next() {
                        Some((_, '"')) => s.push('"'),
                        Some((_, '\\')) => s.push('\\'),
                        _ => return Err(err(column, "bad escape in label")),
                    },
                    c => s.push(c),
                }
            }
            if !closed {
                return Err(err(column, "unterminated label"));
            }
            out.push(Token { text: TokenText::Quoted(s), column });
            continue;
        }
        let start = i;
        let mut end = line.len();
        while let Some(&(j, c)) = chars.peek() {
            if c.is_whitespace() || c == '"' || c == '#' {
                end = j;
                break;
            }
            chars.next();
        }
        out.push(Token { text: TokenText::Word(&line[start..end]), column });
    }
    Ok(out)
}

struct PendingRef {
    id: String,
    span: Span,
}

pub fn parse_module(text: &str) -> Result<ModuleDocument, ParseError> {
    let mut name: Option<String> = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut spans: HashMap<String, Span> = HashMap::new();
    let mut arcs: Vec<(PendingRef, PendingRef)> = Vec::new();
    let mut left: Option<Vec<PendingRef>> = None;
    let mut right: Option<Vec<PendingRef>> = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(line, line_no)?;
        let Some(first) = tokens.first() else {
            continue;
        };
        let at = |t: &Token| Span { line: line_no, column: t.column };
        let syntax = |t: &Token, msg: String| ParseError { span: at(t), kind: ParseErrorKind::Syntax(msg) };
        let word = |t: &Token, what: &str| -> Result<String, ParseError> {
            match &t.text {
                TokenText::Word(w) if is_valid_id(w) => Ok((*w).to_owned()),
                TokenText::Word(w) => Err(syntax(t, format!("{what} {w:?} is not of the form [A-Za-z0-9_]+"))),
                TokenText::Quoted(_) => Err(syntax(t, format!("expected {what}, found quoted text"))),
            }
        };
        let keyword = match &first.text {
            TokenText::Word(w) => *w,
            TokenText::Quoted(_) => return Err(syntax(first, "expected a keyword".into())),
        };
        if name.is_none() && keyword != "module" {
            return Err(syntax(first, "expected `module <Name>` header".into()));
        }
        match keyword {
            "module" => {
                if name.is_some() {
                    return Err(syntax(first, "second module header".into()));
                }
                if tokens.len() != 2 {
                    return Err(syntax(first, "expected `module <Name>`".into()));
                }
                name = Some(word(&tokens[1], "module name")?);
            }
            "place" | "trans" => {
                if tokens.len() != 3 {
                    return Err(syntax(first, format!("expected `{keyword} <id> \"<label>\"`")));
                }
                let id = word(&tokens[1], "id")?;
                let TokenText::Quoted(label) = &tokens[2].text else {
                    return Err(syntax(&tokens[2], "label must be double-quoted".into()));
                };
                if label.is_empty() {
                    return Err(syntax(&tokens[2], "label must be nonempty".into()));
                }
                if spans.contains_key(&id) {
                    return Err(ParseError { span: at(&tokens[1]), kind: ParseErrorKind::DuplicateId(id) });
                }
                spans.insert(id.clone(), at(&tokens[1]));
                elements.push(if keyword == "place" {
                    Element::place(id, label.as_str())
                } else {
                    Element::transition(id, label.as_str())
                });
            }
            "arc" => {
                let arrow_ok = tokens.len() == 4 && matches!(tokens[2].text, TokenText::Word("->"));
                if !arrow_ok {
                    return Err(syntax(first, "expected `arc <id> -> <id>`".into()));
                }
                let from = PendingRef { id: word(&tokens[1], "id")?, span: at(&tokens[1]) };
                let to = PendingRef { id: word(&tokens[3], "id")?, span: at(&tokens[3]) };
                arcs.push((from, to));
            }
            "left" | "right" => {
                let slot = if keyword == "left" { &mut left } else { &mut right };
                if slot.is_some() {
                    return Err(syntax(first, format!("second `{keyword}` line")));
                }
                let refs = tokens[1..]
                    .iter()
                    .map(|t| Ok(PendingRef { id: word(t, "id")?, span: at(t) }))
                    .collect::<Result<Vec<_>, ParseError>>()?;
                *slot = Some(refs);
            }
            other => return Err(syntax(first, format!("unknown keyword {other:?}"))),
        }
    }

    let Some(name) = name else {
        return Err(ParseError {
            span: Span { line: 1, column: 1 },
            kind: ParseErrorKind::Syntax("missing `module <Name>` header".into()),
        });
    };
    let index: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let resolve = |r: &PendingRef| {
        index.get(r.id.as_str()).copied().ok_or_else(|| ParseError {
            span: r.span,
            kind: ParseErrorKind::DanglingReference(r.id.clone()),
        })
    };
    let mut resolved_arcs = Vec::with_capacity(arcs.len());
    let mut arc_spans = HashMap::new();
    for (from, to) in &arcs {
        let (x, y) = (resolve(from)?, resolve(to)?);
        if elements[x].kind == elements[y].kind {
            return Err(ParseError {
                span: from.span,
                kind: ParseErrorKind::Bipartiteness(from.id.clone(), to.id.clone()),
            });
        }
        if arc_spans.insert((x, y), from.span).is_some() {
            return Err(ParseError {
                span: from.span,
                kind: ParseErrorKind::Syntax(format!("duplicate arc {} -> {}", from.id, to.id)),
            });
        }
        resolved_arcs.push((x, y));
    }
    let interface = |refs: Option<Vec<PendingRef>>| -> Result<Vec<usize>, ParseError> {
        let refs = refs.unwrap_or_default();
        let mut out = Vec::with_capacity(refs.len());
        for r in &refs {
            let i = resolve(r)?;
            if out.contains(&i) {
                return Err(ParseError {
                    span: r.span,
                    kind: ParseErrorKind::Syntax(format!("{} listed twice in one interface", r.id)),
                });
            }
            out.push(i);
        }
        Ok(out)
    };
    let left = interface(left)?;
    let right = interface(right)?;
    let module = NetModule::from_parts(elements, resolved_arcs, left, right);
    if let Err(violations) = module.validate() {
        let msg = violations.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ");
        return Err(ParseError { span: Span { line: 1, column: 1 }, kind: ParseErrorKind::Invalid(msg) });
    }
    Ok(ModuleDocument { name, module, spans })
}

fn quote(label: &str) -> String {
    let mut s = String::with_capacity(label.len() + 2);
    s.push('"');
    for c in label.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot serialize invalid module: {0}")]
pub struct SerializeError(pub String);

/// Canonical text: places then transitions, each sorted by id; arcs sorted
/// by source id then target id; interfaces in order.
pub fn serialize_module(name: &str, m: &NetModule) -> Result<String, SerializeError> {
    if let Err(v) = m.validate() {
        return Err(SerializeError(v.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")));
    }
    let mut out = String::new();
    writeln!(out, "module {name}").unwrap();
    for kind in [Kind::Place, Kind::Transition] {
        let mut ids: Vec<&Element> = m.elements().iter().filter(|e| e.kind == kind).collect();
        ids.sort_by(|a, b| a.id.cmp(&b.id));
        for e in ids {
            writeln!(out, "{} {} {}", kind.keyword(), e.id, quote(e.label.name())).unwrap();
        }
    }
    let mut arcs: Vec<(&str, &str)> =
        m.arcs().iter().map(|&(x, y)| (m.element(x).id.as_str(), m.element(y).id.as_str())).collect();
    arcs.sort_unstable();
    for (x, y) in arcs {
        writeln!(out, "arc {x} -> {y}").unwrap();
    }
    for (kw, side) in [("left", m.left()), ("right", m.right())] {
        out.push_str(kw);
        for &i in side {
            out.push(' ');
            out.push_str(&m.element(i).id);
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_is_empty_module() {
        let d = parse_module("module Empty\n").unwrap();
        assert_eq!(d.name, "Empty");
        assert_eq!(d.module, NetModule::empty());
    }

    #[test]
    fn empty_module_serialization() {
        assert_eq!(serialize_module("M", &NetModule::empty()).unwrap(), "module M\nleft\nright\n");
    }

    #[test]
    fn place_to_place_arc_reports_rule_and_line() {
        let text = "module X\nplace a \"a\"\nplace b \"b\"\narc a -> b\n";
        let e = parse_module(text).unwrap_err();
        assert_eq!(e.kind.rule(), "bipartiteness");
        assert_eq!(e.span, Span { line: 4, column: 5 });
        assert!(e.to_string().starts_with("4:5: bipartiteness"));
    }

    #[test]
    fn reference_errors_carry_locations() {
        let e = parse_module("module X\nplace a \"a\"\nleft a zz\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DanglingReference("zz".into()));
        assert_eq!(e.span, Span { line: 3, column: 8 });
        let e = parse_module("module X\nplace a \"a\"\ntrans a \"t\"\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateId("a".into()));
        assert_eq!(e.span.line, 3);
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "place a \"a\"\n",
            "module X\nplace a a\n",
            "module X\nplace a \"unterminated\n",
            "module X\nplace a-b \"x\"\n",
            "module X\narc a b\n",
            "module X\nleft\nleft\n",
            "module X\nfoo\n",
            "",
        ] {
            let e = parse_module(bad).unwrap_err();
            assert_eq!(e.kind.rule(), "syntax", "{bad:?}");
        }
    }

    #[test]
    fn comments_escapes_and_utf8() {
        let text = "# header\nmodule X # trailing\nplace p \"Bäcker \\\"A\\\" \\\\\"\nleft p\n";
        let d = parse_module(text).unwrap();
        assert_eq!(d.module.element(0).label.name(), "Bäcker \"A\" \\");
        let out = serialize_module("X", &d.module).unwrap();
        assert_eq!(parse_module(&out).unwrap().module, d.module);
    }

    #[test]
    fn serialization_is_sorted_and_stable() {
        let text = "module X\ntrans t \"go\"\nplace z \"z\"\nplace a \"a\"\narc z -> t\narc t -> a\nright a\nleft z\n";
        let d = parse_module(text).unwrap();
        let out = serialize_module("X", &d.module).unwrap();
        assert_eq!(
            out,
            "module X\nplace a \"a\"\nplace z \"z\"\ntrans t \"go\"\narc t -> a\narc z -> t\nleft z\nright a\n"
        );
        assert_eq!(out, serialize_module("X", &d.module).unwrap());
    }
}
