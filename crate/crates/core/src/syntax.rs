//! Term surface syntax: `ident(arg,...)`, capitalized identifiers are
//! variables, everything else is a symbol or name.

use std::fmt;

use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '◊'
}

fn is_var_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase() || c == '◊')
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    col_offset: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, line: usize, col_offset: usize) -> Self {
        Parser { chars: src.char_indices().collect(), pos: 0, line, col_offset, _src: src }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.col_offset + self.pos + 1, message: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos].1) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.chars.get(self.pos) {
                Some((_, c)) => self.err(format!("expected identifier, found `{c}`")),
                None => self.err("expected identifier, found end of input"),
            });
        }
        Ok(self.chars[start..self.pos].iter().map(|c| c.1).collect())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident()?;
        if self.peek() == Some('(') {
            if is_var_name(&name) {
                return Err(self.err(format!("variable `{name}` cannot take arguments")));
            }
            self.pos += 1;
            let mut args = Vec::new();
            if self.peek() == Some(')') {
                return Err(self.err("empty argument list; write constants without parentheses"));
            }
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return Err(self.err(format!("expected `,` or `)`, found `{c}`"))),
                    None => return Err(self.err("unclosed argument list")),
                }
            }
            Ok(Term::app(&name, args))
        } else if is_var_name(&name) {
            Ok(Term::var(&name))
        } else {
            Ok(Term::constant(&name))
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected `{c}` after term"))),
        }
    }
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_term_located(src, 1, 0)
}

/// Parses a term that sits on `line` of a file starting at column
/// `col_offset + 1`, so errors carry file locations.
pub fn parse_term_located(src: &str, line: usize, col_offset: usize) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, line, col_offset);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}
