//! Line-oriented file formats: theories (`.trs`), frames (`.frame`), axiom
//! sets (`.eqs`) and plain term lists. `#` starts a comment.

use std::fmt::Write as _;

use crate::knowledge::Frame;
use crate::rewriting::{Rule, Trs};
use crate::signature::Signature;
use crate::syntax::{parse_term_located, ParseError};
use crate::term::{Symbol, Term, Var};
use crate::theory::EqPresentation;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<ParseError> for FormatError {
    fn from(e: ParseError) -> Self {
        FormatError { line: e.line, column: e.column, message: e.message }
    }
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, column: 1, message: message.into() }
}

/// Non-empty lines with comments stripped: `(line number, column offset, text)`.
fn lines(src: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let trimmed = l.trim_start();
        let offset = l.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        (!trimmed.is_empty()).then_some((i + 1, offset, trimmed))
    })
}

fn keyword<'a>(text: &'a str, kw: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(kw)?;
    if rest.is_empty() {
        Some("")
    } else if rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

fn term_at(text: &str, line: usize, offset: usize, whole: &str) -> Result<Term, FormatError> {
    let col = offset + whole.find(text).unwrap_or(0);
    Ok(parse_term_located(text, line, col)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryFile {
    pub name: String,
    pub trs: Trs,
}

fn declare_list(sig: &mut Signature, list: &str, public: bool, line: usize) -> Result<(), FormatError> {
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, arity) = item.split_once('/').ok_or_else(|| err(line, format!("expected name/arity, got `{item}`")))?;
        let arity: usize = arity.trim().parse().map_err(|_| err(line, format!("bad arity in `{item}`")))?;
        sig.declare(name.trim(), arity, public).map_err(|e| err(line, e.to_string()))?;
    }
    Ok(())
}

/// `theory <name>`, optional `symbols f/2, ...` and `private m/0, ...` lines,
/// then `rules` and one `lhs -> rhs` per line. Without a `symbols` line the
/// signature is read off the rules.
pub fn parse_theory(src: &str) -> Result<TheoryFile, FormatError> {
    let mut name = None;
    let mut sig = Signature::new();
    let mut declared = false;
    let mut in_rules = false;
    let mut rules = Vec::new();
    for (line, offset, text) in lines(src) {
        if in_rules {
            let (l, r) = text.split_once("->").ok_or_else(|| err(line, "expected `lhs -> rhs`"))?;
            let lhs = term_at(l.trim(), line, offset, text)?;
            let rhs = term_at(r.trim(), line, offset + l.len() + 2, &text[l.len() + 2..])?;
            let rule = Rule::new(lhs, rhs).map_err(|e| err(line, e.to_string()))?;
            if declared {
                for t in [&rule.lhs, &rule.rhs] {
                    sig.check_term(t).map_err(|e| err(line, e.to_string()))?;
                }
            }
            rules.push(rule);
        } else if let Some(n) = keyword(text, "theory") {
            if n.is_empty() {
                return Err(err(line, "missing theory name"));
            }
            name = Some(n.to_string());
        } else if let Some(list) = keyword(text, "symbols") {
            declared = true;
            declare_list(&mut sig, list, true, line)?;
        } else if let Some(list) = keyword(text, "private") {
            declared = true;
            declare_list(&mut sig, list, false, line)?;
        } else if keyword(text, "rules") == Some("") {
            in_rules = true;
        } else {
            return Err(err(line, format!("unexpected `{text}`")));
        }
    }
    let name = name.ok_or_else(|| err(1, "missing `theory <name>` header"))?;
    if !in_rules {
        return Err(err(1, "missing `rules` section"));
    }
    let trs = if declared {
        Trs::new(sig, rules).map_err(|e| err(1, e.to_string()))?
    } else {
        Trs::from_rules(rules).map_err(|e| err(1, e.to_string()))?
    };
    Ok(TheoryFile { name, trs })
}

fn symbol_list(sig: &Signature, public: bool) -> String {
    let items: Vec<String> =
        sig.iter().filter(|(_, i)| i.public == public).map(|(f, i)| format!("{f}/{}", i.arity)).collect();
    items.join(", ")
}

pub fn print_theory(name: &str, trs: &Trs) -> String {
    let mut out = format!("theory {name}\n");
    let public = symbol_list(trs.signature(), true);
    if !public.is_empty() {
        writeln!(out, "symbols {public}").unwrap();
    }
    let private = symbol_list(trs.signature(), false);
    if !private.is_empty() {
        writeln!(out, "private {private}").unwrap();
    }
    out.push_str("rules\n");
    for r in trs.rules() {
        writeln!(out, "{} -> {}", r.lhs, r.rhs).unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameFile {
    pub name: String,
    pub frame: Frame,
}

/// `frame <name>`, optional `restricted n, e`, then `var = ground-term` lines.
pub fn parse_frame(src: &str) -> Result<FrameFile, FormatError> {
    let mut name = None;
    let mut restricted = Vec::new();
    let mut bindings: Vec<(Var, Term)> = Vec::new();
    for (line, offset, text) in lines(src) {
        if let Some(n) = keyword(text, "frame") {
            if n.is_empty() {
                return Err(err(line, "missing frame name"));
            }
            name = Some(n.to_string());
        } else if let Some(list) = keyword(text, "restricted") {
            restricted.extend(list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Symbol::new));
        } else if let Some((x, t)) = text.split_once('=') {
            let x = x.trim();
            if x.is_empty() || !x.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(err(line, format!("bad frame variable `{x}`")));
            }
            let term = term_at(t.trim(), line, offset + x.len() + 1, &text[x.len() + 1..])?;
            if !term.is_ground() {
                return Err(err(line, format!("binding of {x} is not ground")));
            }
            if bindings.iter().any(|(y, _)| y.as_str() == x) {
                return Err(err(line, format!("frame variable {x} bound twice")));
            }
            bindings.push((Var::new(x), term));
        } else {
            return Err(err(line, format!("unexpected `{text}`")));
        }
    }
    let name = name.ok_or_else(|| err(1, "missing `frame <name>` header"))?;
    let frame = Frame::new(restricted, bindings).map_err(|e| err(1, e.to_string()))?;
    Ok(FrameFile { name, frame })
}

pub fn print_frame(name: &str, frame: &Frame) -> String {
    let mut out = format!("frame {name}\n");
    if !frame.restricted.is_empty() {
        let names: Vec<&str> = frame.restricted.iter().map(|n| n.as_str()).collect();
        writeln!(out, "restricted {}", names.join(", ")).unwrap();
    }
    for (x, t) in frame.bindings() {
        writeln!(out, "{x} = {t}").unwrap();
    }
    out
}

/// `axioms` header, then `l = r` lines.
pub fn parse_axioms(src: &str) -> Result<EqPresentation, FormatError> {
    let mut header = false;
    let mut axioms = Vec::new();
    for (line, offset, text) in lines(src) {
        if !header {
            if keyword(text, "axioms") != Some("") {
                return Err(err(line, "expected `axioms` header"));
            }
            header = true;
            continue;
        }
        let (l, r) = text.split_once('=').ok_or_else(|| err(line, "expected `l = r`"))?;
        let lhs = term_at(l.trim(), line, offset, text)?;
        let rhs = term_at(r.trim(), line, offset + l.len() + 1, &text[l.len() + 1..])?;
        axioms.push((lhs, rhs));
    }
    if !header {
        return Err(err(1, "expected `axioms` header"));
    }
    Ok(EqPresentation::new(axioms))
}

pub fn print_axioms(e: &EqPresentation) -> String {
    format!("axioms\n{e}")
}

/// One ground term per line.
pub fn parse_terms(src: &str) -> Result<Vec<Term>, FormatError> {
    let mut out = Vec::new();
    for (line, offset, text) in lines(src) {
        let t = parse_term_located(text, line, offset)?;
        if !t.is_ground() {
            return Err(err(line, format!("term {t} is not ground")));
        }
        out.push(t);
    }
    Ok(out)
}
