//! Term decompositions and the two-layer check (subterm rules below, the
//! rest above).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::matching::{match_extend, match_term, rename_apart};
use crate::rewriting::{Rule, Trs};
use crate::term::{Position, Substitution, Term, Var};

pub const DEFAULT_DECOMPOSITION_CAP: usize = 4096;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum LayeredError {
    #[error("more than {cap} decompositions of {term}")]
    DecompositionCap { cap: usize, term: Term },
}

/// `l = C[l1..ln, y1..yp, z1..zq]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub holes: Vec<Position>,
    /// `C` with hole `◊i` standing for item `i` (1-based, pieces then `y`s then `z`s).
    pub context: Term,
    pub pieces: Vec<Term>,
    pub ys: Vec<Var>,
    pub zs: Vec<Var>,
    /// Some piece fills more than one hole.
    pub shared_pieces: bool,
}

impl Decomposition {
    /// Pieces, then `y`s, then `z`s, as terms.
    pub fn items(&self) -> Vec<Term> {
        let mut out = self.pieces.clone();
        out.extend(self.ys.iter().map(|v| Term::Var(v.clone())));
        out.extend(self.zs.iter().map(|v| Term::Var(v.clone())));
        out
    }

    pub fn npq(&self) -> (usize, usize, usize) {
        (self.pieces.len(), self.ys.len(), self.zs.len())
    }

    pub fn piece_vars(&self) -> BTreeSet<Var> {
        self.pieces.iter().flat_map(|p| p.vars()).collect()
    }

    /// `C[items]`.
    pub fn reassemble(&self) -> Term {
        fill(&self.context, &self.items())
    }
}

fn hole_var(i: usize) -> Var {
    Var::new(&format!("◊{i}"))
}

/// Replaces `◊i` by item `i`.
pub fn fill(t: &Term, items: &[Term]) -> Term {
    let s: Substitution = items.iter().enumerate().map(|(i, it)| (hole_var(i + 1), it.clone())).collect();
    s.apply(t)
}

fn antichains(t: &Term, here: Position, cap: usize, count: &mut usize) -> Result<Vec<Vec<Position>>, ()> {
    let mut out: Vec<Vec<Position>> = vec![vec![here.clone()]];
    if !t.is_var() {
        let mut partial: Vec<Vec<Position>> = vec![Vec::new()];
        for (i, a) in t.args().iter().enumerate() {
            let sub = antichains(a, here.child(i + 1), cap, count)?;
            let mut next = Vec::new();
            for p in &partial {
                for s in &sub {
                    let mut v = p.clone();
                    v.extend(s.iter().cloned());
                    next.push(v);
                }
                if a.is_ground() {
                    next.push(p.clone());
                }
            }
            if next.len() > cap {
                return Err(());
            }
            partial = next;
        }
        if t.is_ground() || !t.args().is_empty() {
            out.extend(partial.into_iter().filter(|p| !p.is_empty() || t.is_ground()));
        }
    }
    *count += out.len();
    if out.len() > cap {
        return Err(());
    }
    Ok(out)
}

/// Every decomposition whose holes form an antichain covering all variable
/// occurrences, so that `C` itself is ground.
pub fn enumerate_decompositions(l: &Term, cap: usize) -> Result<Vec<Decomposition>, LayeredError> {
    let err = || LayeredError::DecompositionCap { cap, term: l.clone() };
    let mut count = 0;
    let mut chains = antichains(l, Position::root(), cap, &mut count).map_err(|_| err())?;
    chains.retain(|c| !c.is_empty());
    chains.sort();
    chains.dedup();
    if chains.len() > cap {
        return Err(err());
    }
    let mut out = Vec::new();
    for holes in chains {
        let subs: Vec<Term> = holes.iter().map(|p| l.at(p).expect("own position").clone()).collect();
        let mut pieces: Vec<Term> = Vec::new();
        let mut shared = false;
        for s in &subs {
            if !s.is_var() {
                if pieces.contains(s) {
                    shared = true;
                } else {
                    pieces.push(s.clone());
                }
            }
        }
        let pvars: BTreeSet<Var> = pieces.iter().flat_map(|p| p.vars()).collect();
        let mut ys = Vec::new();
        let mut zs = Vec::new();
        for s in &subs {
            if let Term::Var(v) = s {
                let list = if pvars.contains(v) { &mut ys } else { &mut zs };
                if !list.contains(v) {
                    list.push(v.clone());
                }
            }
        }
        let mut items: Vec<Term> = pieces.clone();
        items.extend(ys.iter().map(|v| Term::Var(v.clone())));
        items.extend(zs.iter().map(|v| Term::Var(v.clone())));
        let mut context = l.clone();
        for (p, s) in holes.iter().zip(&subs) {
            let k = items.iter().position(|it| it == s).expect("item listed") + 1;
            context = context.replace_at(p, Term::Var(hole_var(k))).expect("own position");
        }
        out.push(Decomposition { holes, context, pieces, ys, zs, shared_pieces: shared });
    }
    Ok(out)
}

/// How one `s_j` is obtained from the items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepWitness {
    /// `s_j = C_j[items]`, no rewriting.
    Zero { context: Term },
    /// `C_j[items] →ε s_j` with lower-layer rule `rule` (0-based in the system).
    One { context: Term, rule: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum DecompositionWitness {
    VariablesInPieces,
    Assembled { outer: Term, steps: Vec<(Term, StepWitness)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleLayering {
    /// 0-based rule index.
    pub rule: usize,
    /// 1 for the subterm layer, 2 for the rest.
    pub layer: usize,
    pub decompositions: Vec<(Decomposition, DecompositionWitness)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LayeredVerdict {
    Layered { table: Vec<RuleLayering> },
    /// No witness found within the context cap.
    Unknown { rule: usize, decomposition: Decomposition },
    /// The lower layer is empty and `r` is not a ground context over the items,
    /// so no witness exists for this chain.
    NotLayeredEvidence { rule: usize, decomposition: Decomposition },
}

struct Search<'a> {
    items: Vec<Term>,
    lower: Vec<(usize, &'a Rule)>,
    cap: usize,
}

impl Search<'_> {
    fn item_hole(&self, t: &Term) -> Option<Term> {
        self.items.iter().position(|i| i == t).map(|k| Term::Var(hole_var(k + 1)))
    }

    /// A ground context over the items equal to `t`.
    fn zero(&self, t: &Term) -> Option<Term> {
        if let Some(h) = self.item_hole(t) {
            return Some(h);
        }
        match t {
            Term::App(f, args) => {
                let cs: Option<Vec<Term>> = args.iter().map(|a| self.zero(a)).collect();
                Some(Term::App(f.clone(), cs?))
            }
            Term::Var(_) => None,
        }
    }

    /// A context `C` over the items with `C[items]` an instance of `p`
    /// extending `binds`, of size at most `budget`.
    fn build(&self, p: &Term, binds: &BTreeMap<Var, Term>, budget: usize) -> Vec<(BTreeMap<Var, Term>, Term, usize)> {
        let mut out = Vec::new();
        if budget == 0 {
            return out;
        }
        match p {
            Term::Var(x) => match binds.get(x) {
                Some(v) => {
                    if let Some(c) = self.zero(v) {
                        if c.size() <= budget {
                            let n = c.size();
                            out.push((binds.clone(), c, n));
                        }
                    }
                }
                None => {
                    for (k, it) in self.items.iter().enumerate() {
                        let mut b = binds.clone();
                        b.insert(x.clone(), it.clone());
                        out.push((b, Term::Var(hole_var(k + 1)), 1));
                    }
                }
            },
            Term::App(f, args) => {
                for (k, it) in self.items.iter().enumerate() {
                    if let Some(b) = match_extend(p, it, binds) {
                        out.push((b, Term::Var(hole_var(k + 1)), 1));
                    }
                }
                let mut partial: Vec<(BTreeMap<Var, Term>, Vec<Term>, usize)> = vec![(binds.clone(), vec![], 1)];
                for (i, a) in args.iter().enumerate() {
                    let still = args.len() - i - 1;
                    let mut next = Vec::new();
                    for (b, cs, cost) in partial {
                        if cost + still + 1 > budget {
                            continue;
                        }
                        for (b2, c, n) in self.build(a, &b, budget - cost - still) {
                            let mut cs = cs.clone();
                            cs.push(c);
                            next.push((b2, cs, cost + n));
                        }
                    }
                    partial = next;
                }
                for (b, cs, cost) in partial {
                    out.push((b, Term::App(f.clone(), cs), cost));
                }
            }
        }
        out
    }

    fn one(&self, u: &Term) -> Option<StepWitness> {
        for (idx, rule) in &self.lower {
            let l = rename_apart(&rule.lhs, "_w");
            let r = rename_apart(&rule.rhs, "_w");
            let Some(theta) = match_term(&r, u) else { continue };
            let binds: BTreeMap<Var, Term> = theta.iter().map(|(x, t)| (x.clone(), t.clone())).collect();
            let mut found = self.build(&l, &binds, self.cap);
            found.sort_by(|a, b| (a.2, &a.1).cmp(&(b.2, &b.1)));
            if let Some((_, c, _)) = found.into_iter().next() {
                return Some(StepWitness::One { context: c, rule: *idx });
            }
        }
        None
    }

    /// Splits `u` into an outer context and steps: an item, then a single
    /// lower-layer root step, then recursion into arguments.
    fn derive(&self, u: &Term, steps: &mut Vec<(Term, StepWitness)>) -> Option<Term> {
        if let Some(h) = self.item_hole(u) {
            steps.push((u.clone(), StepWitness::Zero { context: h }));
            return Some(Term::Var(hole_var(steps.len() + 1000)));
        }
        if let Some(w) = self.one(u) {
            steps.push((u.clone(), w));
            return Some(Term::Var(hole_var(steps.len() + 1000)));
        }
        match u {
            Term::App(f, args) => {
                let mut cs = Vec::new();
                for a in args {
                    cs.push(self.derive(a, steps)?);
                }
                Some(Term::App(f.clone(), cs))
            }
            Term::Var(_) => None,
        }
    }
}

/// Renumbers outer holes from the internal offset to `◊1..◊k`.
fn renumber(t: &Term) -> Term {
    t.rename_vars(&mut |v| {
        let n: usize = v.as_str().trim_start_matches('◊').parse().expect("outer hole");
        hole_var(n - 1000)
    })
}

/// Checks every decomposition of every rule against the chain
/// `∅ ⊆ subterm rules ⊆ R`.
pub fn layered_check(trs: &Trs, context_cap: usize, decomposition_cap: usize) -> Result<LayeredVerdict, LayeredError> {
    let lower_rules: Vec<(usize, &Rule)> =
        trs.rules().iter().enumerate().filter(|(_, r)| r.is_subterm_rule()).collect();
    let mut table = Vec::new();
    for (i, rule) in trs.rules().iter().enumerate() {
        let layer = if rule.is_subterm_rule() { 1 } else { 2 };
        let lower = if layer == 1 { Vec::new() } else { lower_rules.clone() };
        let mut rows = Vec::new();
        for d in enumerate_decompositions(&rule.lhs, decomposition_cap)? {
            if rule.rhs.vars().is_subset(&d.piece_vars()) {
                rows.push((d, DecompositionWitness::VariablesInPieces));
                continue;
            }
            let search = Search { items: d.items(), lower: lower.clone(), cap: context_cap };
            let mut steps = Vec::new();
            match search.derive(&rule.rhs, &mut steps) {
                Some(outer) => rows.push((d, DecompositionWitness::Assembled { outer: renumber(&outer), steps })),
                None if lower.is_empty() => {
                    return Ok(LayeredVerdict::NotLayeredEvidence { rule: i, decomposition: d });
                }
                None => return Ok(LayeredVerdict::Unknown { rule: i, decomposition: d }),
            }
        }
        table.push(RuleLayering { rule: i, layer, decompositions: rows });
    }
    Ok(LayeredVerdict::Layered { table })
}

impl LayeredVerdict {
    /// Replays every witness of a `Layered` verdict.
    pub fn validate(&self, trs: &Trs) -> Result<(), String> {
        let LayeredVerdict::Layered { table } = self else { return Ok(()) };
        for row in table {
            let rule = trs.rules().get(row.rule).ok_or("missing rule")?;
            for (d, w) in &row.decompositions {
                if d.reassemble() != rule.lhs {
                    return Err(format!("decomposition of rule {} does not reassemble", row.rule + 1));
                }
                match w {
                    DecompositionWitness::VariablesInPieces => {
                        if !rule.rhs.vars().is_subset(&d.piece_vars()) {
                            return Err("variables not covered by pieces".into());
                        }
                    }
                    DecompositionWitness::Assembled { outer, steps } => {
                        let items = d.items();
                        let mut sj = Vec::new();
                        for (s, st) in steps {
                            let got = match st {
                                StepWitness::Zero { context } => fill(context, &items),
                                StepWitness::One { context, rule: k } => {
                                    let lower = trs.rules().get(*k).ok_or("missing lower rule")?;
                                    if row.layer == 1 || !lower.is_subterm_rule() {
                                        return Err("step uses a rule outside the lower layer".into());
                                    }
                                    let redex = fill(context, &items);
                                    let theta = match_term(&lower.lhs, &redex).ok_or("context is not a redex")?;
                                    theta.apply(&lower.rhs)
                                }
                            };
                            if got != *s {
                                return Err(format!("step does not produce {s}"));
                            }
                            sj.push(s.clone());
                        }
                        if fill(outer, &sj) != rule.rhs {
                            return Err("outer context does not rebuild the rhs".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
