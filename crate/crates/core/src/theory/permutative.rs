//! Equational presentations, permutative axioms, equality and deduction
//! modulo a permutative theory.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::knowledge::Frame;
use crate::matching::match_term;
use crate::term::{Symbol, Term};

pub const DEFAULT_CLASS_CAP: usize = 100_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum PermutativeError {
    #[error("the presentation is not permutative (axiom {0})")]
    NotPermutative(usize),
    #[error("equivalence class exceeded the cap of {cap} terms")]
    ClassCap { cap: usize },
    #[error("term {0} is not ground")]
    NonGround(Term),
    #[error("axiom {0} has a variable side or a side with variables the other lacks")]
    BadAxiom(usize),
}

/// A finite set of unoriented axioms `l = r`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EqPresentation {
    pub axioms: Vec<(Term, Term)>,
}

impl EqPresentation {
    pub fn new(axioms: Vec<(Term, Term)>) -> Self {
        EqPresentation { axioms }
    }

    pub fn parse(axioms: &[&str]) -> Result<Self, String> {
        let mut out = Vec::new();
        for a in axioms {
            let (l, r) = a.split_once('=').ok_or_else(|| format!("missing `=` in {a}"))?;
            let l = crate::syntax::parse_term(l.trim()).map_err(|e| e.to_string())?;
            let r = crate::syntax::parse_term(r.trim()).map_err(|e| e.to_string())?;
            out.push((l, r));
        }
        Ok(EqPresentation { axioms: out })
    }

    /// Symbols rooting either side of some axiom.
    pub fn root_symbols(&self) -> BTreeSet<Symbol> {
        self.axioms.iter().flat_map(|(l, r)| [l.root(), r.root()]).flatten().cloned().collect()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.axioms.iter().flat_map(|(l, r)| l.symbols().into_iter().chain(r.symbols())).collect()
    }

    fn oriented(&self) -> Result<Vec<(Term, Term)>, PermutativeError> {
        let mut out = Vec::new();
        for (i, (l, r)) in self.axioms.iter().enumerate() {
            if l.is_var() || r.is_var() || l.vars() != r.vars() {
                return Err(PermutativeError::BadAxiom(i + 1));
            }
            out.push((l.clone(), r.clone()));
            out.push((r.clone(), l.clone()));
        }
        Ok(out)
    }
}

impl fmt::Display for EqPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, r) in &self.axioms {
            writeln!(f, "{l} = {r}")?;
        }
        Ok(())
    }
}

/// Each axiom has the same occurrence count of every symbol and variable on
/// both sides.
pub fn check_permutative(e: &EqPresentation) -> bool {
    first_non_permutative(e).is_none()
}

/// 1-based index of the first axiom whose sides have different counts.
pub fn first_non_permutative(e: &EqPresentation) -> Option<usize> {
    e.axioms.iter().position(|(l, r)| l.symbol_multiset() != r.symbol_multiset()).map(|i| i + 1)
}

fn steps(axioms: &[(Term, Term)], t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    for p in t.positions() {
        let sub = t.at(&p).expect("own position");
        if sub.is_var() {
            continue;
        }
        for (l, r) in axioms {
            if let Some(theta) = match_term(l, sub) {
                out.push(t.replace_at(&p, theta.apply(r)).expect("own position"));
            }
        }
    }
    out
}

/// The `=_E` class of `t`, finite because steps preserve size.
pub fn permutative_class(e: &EqPresentation, t: &Term, cap: usize) -> Result<BTreeSet<Term>, PermutativeError> {
    if let Some(i) = first_non_permutative(e) {
        return Err(PermutativeError::NotPermutative(i));
    }
    let axioms = e.oriented()?;
    let mut seen: BTreeSet<Term> = [t.clone()].into_iter().collect();
    let mut queue: VecDeque<Term> = [t.clone()].into_iter().collect();
    while let Some(u) = queue.pop_front() {
        for v in steps(&axioms, &u) {
            if seen.insert(v.clone()) {
                if seen.len() > cap {
                    return Err(PermutativeError::ClassCap { cap });
                }
                queue.push_back(v);
            }
        }
    }
    Ok(seen)
}

pub fn eq_modulo_permutative(e: &EqPresentation, s: &Term, t: &Term, cap: usize) -> Result<bool, PermutativeError> {
    if let Some(i) = first_non_permutative(e) {
        return Err(PermutativeError::NotPermutative(i));
    }
    if s.symbol_multiset() != t.symbol_multiset() {
        return Ok(false);
    }
    Ok(s == t || permutative_class(e, s, cap)?.contains(t))
}

struct Deducer<'a> {
    e: &'a EqPresentation,
    frame: &'a Frame,
    cap: usize,
    classes: HashMap<Term, BTreeSet<Term>>,
    memo: BTreeMap<Term, Option<Term>>,
}

impl Deducer<'_> {
    fn class(&mut self, t: &Term) -> Result<BTreeSet<Term>, PermutativeError> {
        if let Some(c) = self.classes.get(t) {
            return Ok(c.clone());
        }
        let c = permutative_class(self.e, t, self.cap)?;
        for u in &c {
            self.classes.insert(u.clone(), c.clone());
        }
        Ok(c)
    }

    /// Smallest recipe (size, then term order) for `t`.
    fn best(&mut self, t: &Term) -> Result<Option<Term>, PermutativeError> {
        let class = self.class(t)?;
        let key = class.iter().next().expect("class contains t").clone();
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let mut cands: Vec<Term> = Vec::new();
        for (x, v) in self.frame.bindings() {
            if class.contains(v) {
                cands.push(Term::Var(x.clone()));
            }
        }
        'outer: for u in &class {
            let Term::App(f, args) = u else { continue };
            if self.frame.is_restricted(f) {
                continue;
            }
            let mut rs = Vec::new();
            for a in args {
                match self.best(a)? {
                    Some(r) => rs.push(r),
                    None => continue 'outer,
                }
            }
            cands.push(Term::App(f.clone(), rs));
        }
        let out = cands.into_iter().min_by(|a, b| (a.size(), a).cmp(&(b.size(), b)));
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// A recipe `s` over public symbols, unrestricted names and frame variables
/// with `sσ =_E t`, or `None`.
pub fn deduce_permutative(
    e: &EqPresentation,
    frame: &Frame,
    t: &Term,
    cap: usize,
) -> Result<Option<Term>, PermutativeError> {
    if !t.is_ground() {
        return Err(PermutativeError::NonGround(t.clone()));
    }
    if let Some(i) = first_non_permutative(e) {
        return Err(PermutativeError::NotPermutative(i));
    }
    e.oriented()?;
    let mut d = Deducer { e, frame, cap, classes: HashMap::new(), memo: BTreeMap::new() };
    d.best(t)
}
