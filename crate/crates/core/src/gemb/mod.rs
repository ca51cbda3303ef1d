//! The graph-embedding rewrite schema and the relation it induces.
//!
//! Intermediate terms of a derivation may violate the signature's arities
//! ("flex" terms); only the end point of a derivation has to be well formed.

mod minor;
mod perm;

pub use minor::{graph_minor_oracle, MinorError, TreeGraph, DEFAULT_MINOR_BUDGET};
pub use perm::{leaf_perm_eq, perm_class, perm_eq, subterm_perm_eq, LeafBijection, PermWitness, MAX_PERMUTED_ARITY};

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::rewriting::Trs;
use crate::signature::Signature;
use crate::term::{Position, Symbol, Term};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum GembError {
    #[error("root arity {0} exceeds the permutation limit")]
    RootArityTooLarge(usize),
    #[error("graph-embedding search exceeded {0} states")]
    StateCap(usize),
    #[error("terms disagree on symbol arities: {0}")]
    IllFormed(String),
}

/// The four schema rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GembRule {
    /// `f(x1..xn) → xi`
    Project,
    /// `f(x1..xn) → f(x1..x(i-1),x(i+1)..xn)`
    Drop,
    /// `f(..,g(z̄),..) → g(..,z̄,..)`
    HoistChild,
    /// `f(..,g(z̄),..) → f(..,z̄,..)`
    HoistParent,
}

impl GembRule {
    pub fn number(self) -> u8 {
        match self {
            GembRule::Project => 1,
            GembRule::Drop => 2,
            GembRule::HoistChild => 3,
            GembRule::HoistParent => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GembStep {
    pub rule: GembRule,
    pub position: Position,
    /// Symbol at `position` before the step.
    pub symbol: Symbol,
    /// Symbol of the spliced child, for rules 3 and 4.
    pub child_symbol: Option<Symbol>,
    /// 1-based argument index the rule acts on.
    pub index: usize,
}

impl fmt::Display for GembStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} at {} on argument {} of {}", self.rule.number(), self.position, self.index, self.symbol)?;
        if let Some(g) = &self.child_symbol {
            write!(f, " (child {g})")?;
        }
        Ok(())
    }
}

/// Applies one schema step, or returns `None` if it does not fit the term.
pub fn apply_gemb_step(t: &Term, step: &GembStep) -> Option<Term> {
    let node = t.at(&step.position)?;
    let Term::App(f, args) = node else { return None };
    if *f != step.symbol || step.index == 0 || step.index > args.len() {
        return None;
    }
    let i = step.index - 1;
    let new = match step.rule {
        GembRule::Project => args[i].clone(),
        GembRule::Drop => {
            let mut a = args.clone();
            a.remove(i);
            Term::App(f.clone(), a)
        }
        GembRule::HoistChild | GembRule::HoistParent => {
            let Term::App(g, zs) = &args[i] else { return None };
            if step.child_symbol.as_ref() != Some(g) {
                return None;
            }
            let mut a = args[..i].to_vec();
            a.extend(zs.iter().cloned());
            a.extend(args[i + 1..].iter().cloned());
            let head = if step.rule == GembRule::HoistChild { g.clone() } else { f.clone() };
            Term::App(head, a)
        }
    };
    t.replace_at(&step.position, new)
}

/// All one-step reducts at all positions, deduplicated by result. When the
/// two hoists coincide (same symbol) the step is recorded as rule 4.
pub fn gemb_successors(t: &Term) -> Vec<(Term, GembStep)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in t.positions() {
        let Some(Term::App(f, args)) = t.at(&p) else { continue };
        for i in 1..=args.len() {
            let mut steps = vec![
                GembStep { rule: GembRule::Project, position: p.clone(), symbol: f.clone(), child_symbol: None, index: i },
                GembStep { rule: GembRule::Drop, position: p.clone(), symbol: f.clone(), child_symbol: None, index: i },
            ];
            if let Term::App(g, _) = &args[i - 1] {
                for rule in [GembRule::HoistParent, GembRule::HoistChild] {
                    steps.push(GembStep { rule, position: p.clone(), symbol: f.clone(), child_symbol: Some(g.clone()), index: i });
                }
            }
            for s in steps {
                let u = apply_gemb_step(t, &s).expect("step built from the term");
                if seen.insert(u.clone()) {
                    out.push((u, s));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GembDerivation {
    pub start: Term,
    pub steps: Vec<GembStep>,
    /// Last term of the derivation; well formed.
    pub end: Term,
    /// How `end` is permuted into the target.
    pub perm: PermWitness,
}

impl GembDerivation {
    /// Replays the steps and the final permutation, returning the target.
    pub fn replay(&self) -> Option<Term> {
        let mut cur = self.start.clone();
        for s in &self.steps {
            let before = cur.size();
            cur = apply_gemb_step(&cur, s)?;
            if cur.size() >= before {
                return None;
            }
        }
        (cur == self.end).then(|| self.perm.apply(&cur))?
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GembOptions {
    /// Allow leaf bijections that swap variables and constants.
    pub cross_kind: bool,
    /// Require at least one schema step.
    pub require_step: bool,
    /// Maximum number of distinct terms visited.
    pub state_cap: usize,
}

impl Default for GembOptions {
    fn default() -> Self {
        GembOptions { cross_kind: false, require_step: false, state_cap: 2_000_000 }
    }
}

/// Arity oracle for deciding when a flex term is well formed.
pub(crate) fn arity_oracle(sig: Option<&Signature>, terms: &[&Term]) -> Result<Signature, GembError> {
    let mut s = sig.cloned().unwrap_or_default();
    for t in terms {
        s.absorb(t).map_err(|e| GembError::IllFormed(e.to_string()))?;
    }
    Ok(s)
}

/// `t ≽_gemb u`: a derivation `t →* s` with `s ≈ u`, `s` well formed.
pub fn graph_embedded_rel(t: &Term, u: &Term, opts: &GembOptions) -> Result<Option<GembDerivation>, GembError> {
    let sig = arity_oracle(None, &[t, u])?;
    graph_embedded_rel_in(&sig, t, u, opts)
}

/// As [`graph_embedded_rel`], judging well-formedness against `sig`.
pub fn graph_embedded_rel_in(
    sig: &Signature,
    t: &Term,
    u: &Term,
    opts: &GembOptions,
) -> Result<Option<GembDerivation>, GembError> {
    let target_size = u.size();
    let target_syms = u.symbols();
    let target_vars = u.vars();
    let mut parent: HashMap<Term, Option<(Term, GembStep)>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(t.clone(), None);
    queue.push_back(t.clone());
    while let Some(s) = queue.pop_front() {
        let size = s.size();
        if size < target_size || !target_syms.is_subset(&s.symbols()) || !target_vars.is_subset(&s.vars()) {
            continue;
        }
        let counts = !(opts.require_step && s == *t);
        if counts && size == target_size && sig.is_well_formed(&s) {
            if let Some(w) = perm_eq(&s, u, opts.cross_kind)? {
                let mut steps = Vec::new();
                let mut cur = s.clone();
                while let Some(Some((prev, step))) = parent.get(&cur) {
                    steps.push(step.clone());
                    cur = prev.clone();
                }
                steps.reverse();
                return Ok(Some(GembDerivation { start: t.clone(), steps, end: s, perm: w }));
            }
        }
        if size == target_size {
            continue;
        }
        for (v, step) in gemb_successors(&s) {
            if parent.contains_key(&v) {
                continue;
            }
            if parent.len() >= opts.state_cap {
                return Err(GembError::StateCap(opts.state_cap));
            }
            parent.insert(v.clone(), Some((s.clone(), step)));
            queue.push_back(v);
        }
    }
    Ok(None)
}

/// Every well-formed term reachable from `t` by schema steps (including `t`).
pub fn reachable_well_formed(sig: &Signature, t: &Term, cap: usize) -> Result<Vec<Term>, GembError> {
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(t.clone());
    queue.push_back(t.clone());
    while let Some(s) = queue.pop_front() {
        if sig.is_well_formed(&s) {
            out.push(s.clone());
        }
        for (v, _) in gemb_successors(&s) {
            if seen.insert(v.clone()) {
                if seen.len() > cap {
                    return Err(GembError::StateCap(cap));
                }
                queue.push_back(v);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GembRuleVerdict {
    ConstantRhs,
    Embedded { derivation: GembDerivation },
    NotEmbedded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GembTrsReport {
    pub rules: Vec<GembRuleVerdict>,
    pub holds: bool,
}

/// A system is graph-embedded when every rule has `l ≽_gemb r` or a constant
/// right-hand side.
pub fn check_graph_embedded_trs(trs: &Trs, opts: &GembOptions) -> Result<GembTrsReport, GembError> {
    let mut rules = Vec::new();
    for r in trs.rules() {
        let v = if r.rhs.is_constant() {
            GembRuleVerdict::ConstantRhs
        } else {
            match graph_embedded_rel_in(trs.signature(), &r.lhs, &r.rhs, opts)? {
                Some(derivation) => GembRuleVerdict::Embedded { derivation },
                None => GembRuleVerdict::NotEmbedded,
            }
        };
        rules.push(v);
    }
    let holds = rules.iter().all(|v| !matches!(v, GembRuleVerdict::NotEmbedded));
    Ok(GembTrsReport { rules, holds })
}

/// Per-rule `l ⊵_emb r` (a constant rhs also counts) and the conjunction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomTrsReport {
    pub rules: Vec<bool>,
    pub holds: bool,
}

pub fn check_hom_embedded_trs(trs: &Trs) -> HomTrsReport {
    let rules: Vec<bool> =
        trs.rules().iter().map(|r| r.rhs.is_constant() || crate::matching::hom_embedded(&r.lhs, &r.rhs)).collect();
    let holds = rules.iter().all(|b| *b);
    HomTrsReport { rules, holds }
}
