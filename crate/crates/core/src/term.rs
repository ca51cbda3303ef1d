//! First-order terms, positions, substitutions and contexts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// A function symbol or name. Constants are symbols applied to no arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A term. The derived order puts variables before applications and compares
/// applications by symbol, then argument list; it is the tie-breaking order
/// used wherever a canonical choice between terms is needed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::App(Symbol::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Symbol::new(name), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::App(_, args) if args.is_empty())
    }

    /// Variables and constants.
    pub fn is_leaf(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::App(_, args) => args.is_empty(),
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_ordered(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    pub fn occurrences(&self, x: &Var) -> usize {
        match self {
            Term::Var(v) => usize::from(v == x),
            Term::App(_, args) => args.iter().map(|a| a.occurrences(x)).sum(),
        }
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut ok = true;
        self.walk(&mut |t| {
            if let Term::Var(v) = t {
                ok &= seen.insert(v.clone());
            }
        });
        ok
    }

    /// Function symbols, constants included.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::App(f, _) = t {
                out.insert(f.clone());
            }
        });
        out
    }

    /// Constant leaves, i.e. the names occurring in the term.
    pub fn constants(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if let Term::App(f, args) = t {
                if args.is_empty() {
                    out.insert(f.clone());
                }
            }
        });
        out
    }

    /// Occurrence counts of every symbol and variable, keyed by display name
    /// with variables prefixed by `?` so the two kinds never collide.
    pub fn symbol_multiset(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.walk(&mut |t| {
            let key = match t {
                Term::Var(v) => format!("?{v}"),
                Term::App(f, _) => f.to_string(),
            };
            *out.entry(key).or_insert(0) += 1;
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<F: FnMut(&Term)>(&self, f: &mut F) {
        f(self);
        if let Term::App(_, args) = self {
            for a in args {
                a.walk(f);
            }
        }
    }

    /// All positions in pre-order (parents before children, left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_positions(&mut cur, &mut out);
        out
    }

    fn collect_positions(&self, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
        out.push(Position(cur.clone()));
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                cur.push(i + 1);
                a.collect_positions(cur, out);
                cur.pop();
            }
        }
    }

    /// Positions in leftmost-innermost order: children before parents.
    pub fn positions_innermost(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.collect_post(&mut cur, &mut out);
        out
    }

    fn collect_post(&self, cur: &mut Vec<usize>, out: &mut Vec<Position>) {
        if let Term::App(_, args) = self {
            for (i, a) in args.iter().enumerate() {
                cur.push(i + 1);
                a.collect_post(cur, out);
                cur.pop();
            }
        }
        out.push(Position(cur.clone()));
    }

    pub fn at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &p.0 {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// `t[u]_p`.
    pub fn replace_at(&self, p: &Position, u: Term) -> Option<Term> {
        self.replace_path(&p.0, u)
    }

    fn replace_path(&self, path: &[usize], u: Term) -> Option<Term> {
        match path.split_first() {
            None => Some(u),
            Some((&i, rest)) => match self {
                Term::Var(_) => None,
                Term::App(f, args) => {
                    let idx = i.checked_sub(1)?;
                    let child = args.get(idx)?.replace_path(rest, u)?;
                    let mut args = args.clone();
                    args[idx] = child;
                    Some(Term::App(f.clone(), args))
                }
            },
        }
    }

    /// st(t), including t itself.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            out.insert(t.clone());
        });
        out
    }

    pub fn strict_subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for a in self.args() {
            a.walk(&mut |t| {
                out.insert(t.clone());
            });
        }
        out
    }

    pub fn has_subterm(&self, u: &Term) -> bool {
        self == u || self.args().iter().any(|a| a.has_subterm(u))
    }

    pub fn has_strict_subterm(&self, u: &Term) -> bool {
        self.args().iter().any(|a| a.has_subterm(u))
    }

    pub fn measures(&self) -> TermGraphMeasures {
        let mut vp = 0;
        let mut fp = 0;
        let mut fs = BTreeSet::new();
        self.walk(&mut |t| match t {
            Term::Var(_) => vp += 1,
            Term::App(f, _) => {
                fp += 1;
                fs.insert(f.clone());
            }
        });
        TermGraphMeasures {
            vp,
            fp,
            fs,
            var_count: self.vars().len(),
            size: vp + fp,
            depth: self.depth(),
        }
    }

    /// Renames every variable through `f`.
    pub fn rename_vars<F: FnMut(&Var) -> Var>(&self, f: &mut F) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.rename_vars(f)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) => {
                write!(f, "{s}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermGraphMeasures {
    pub vp: usize,
    pub fp: usize,
    pub fs: BTreeSet<Symbol>,
    pub var_count: usize,
    pub size: usize,
    pub depth: usize,
}

/// A position: a path of 1-based child indices. The empty path is the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Neither position is a prefix of the other.
    pub fn is_parallel_to(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Position {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A finite substitution. Bindings `x ↦ x` are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn insert(&mut self, x: Var, t: Term) {
        if t.as_var() == Some(&x) {
            self.0.remove(&x);
        } else {
            self.0.insert(x, t);
        }
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.0.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.0.keys()
    }

    /// Simultaneous application.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}↦{t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (x, t) in &self.0 {
            m.serialize_entry(x.as_str(), &t.to_string())?;
        }
        m.end()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("context hole {0} occurs more than once")]
    NonLinear(String),
    #[error("context has {expected} holes but {found} arguments were supplied")]
    ArityMismatch { expected: usize, found: usize },
}

/// A linear term whose variables are all holes, ordered by left-to-right
/// occurrence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context(Term);

impl Context {
    pub fn new(t: Term) -> Result<Self, ContextError> {
        let mut seen = BTreeSet::new();
        let mut dup = None;
        t.walk(&mut |s| {
            if let Term::Var(v) = s {
                if !seen.insert(v.clone()) && dup.is_none() {
                    dup = Some(v.to_string());
                }
            }
        });
        match dup {
            Some(v) => Err(ContextError::NonLinear(v)),
            None => Ok(Context(t)),
        }
    }

    /// The hole `◊i` as a term, 1-based.
    pub fn hole(i: usize) -> Term {
        Term::var(&format!("◊{i}"))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn holes(&self) -> Vec<Var> {
        self.0.vars_ordered()
    }

    pub fn hole_count(&self) -> usize {
        self.holes().len()
    }

    /// Holes count 1 each.
    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn apply(&self, args: &[Term]) -> Result<Term, ContextError> {
        let holes = self.holes();
        if holes.len() != args.len() {
            return Err(ContextError::ArityMismatch { expected: holes.len(), found: args.len() });
        }
        let s: Substitution = holes.into_iter().zip(args.iter().cloned()).collect();
        Ok(s.apply(&self.0))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl serde::Serialize for Context {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
