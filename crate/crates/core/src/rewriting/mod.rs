//! Rewrite rules, rewrite systems, normalization and structural checks.

mod convergence;
mod critical;

pub use convergence::{check_convergent, ConvergenceBudgets, ConvergenceVerdict, NonConvergenceWitness, TerminationEvidence};
pub use critical::{critical_pairs, CriticalPair};

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::matching::match_term;
use crate::signature::{Signature, SignatureError};
use crate::term::{Position, Substitution, Symbol, Term};

pub const DEFAULT_NORMALIZE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("left-hand side `{0}` is a variable")]
    VariableLhs(Term),
    #[error("right-hand side `{rhs}` has variables not in `{lhs}`")]
    UnboundRhsVariable { lhs: Term, rhs: Term },
    #[error("rule {index}: {source}")]
    IllFormed { index: usize, source: SignatureError },
    #[error("rewrite system has no rules")]
    Empty,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, RuleError> {
        if lhs.is_var() {
            return Err(RuleError::VariableLhs(lhs));
        }
        if !rhs.vars().is_subset(&lhs.vars()) {
            return Err(RuleError::UnboundRhsVariable { lhs, rhs });
        }
        Ok(Rule { lhs, rhs })
    }

    /// The rhs is a strict subterm of the lhs or a constant.
    pub fn is_subterm_rule(&self) -> bool {
        self.rhs.is_constant() || self.lhs.has_strict_subterm(&self.rhs)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term rewrite system over a signature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trs {
    signature: Signature,
    rules: Vec<Rule>,
}

impl Trs {
    pub fn new(signature: Signature, rules: Vec<Rule>) -> Result<Self, RuleError> {
        for (i, r) in rules.iter().enumerate() {
            for t in [&r.lhs, &r.rhs] {
                signature.check_term(t).map_err(|source| RuleError::IllFormed { index: i + 1, source })?;
            }
        }
        Ok(Trs { signature, rules })
    }

    /// Builds a system whose signature is read off the rules.
    pub fn from_rules(rules: Vec<Rule>) -> Result<Self, RuleError> {
        let terms: Vec<&Term> = rules.iter().flat_map(|r| [&r.lhs, &r.rhs]).collect();
        let signature =
            Signature::infer(terms).map_err(|source| RuleError::IllFormed { index: 0, source })?;
        Ok(Trs { signature, rules })
    }

    /// Parses `lhs -> rhs` strings; meant for tests and small tools.
    pub fn parse_rules(rules: &[&str]) -> Result<Self, String> {
        let mut out = Vec::new();
        for r in rules {
            let (l, rhs) = r.split_once("->").ok_or_else(|| format!("missing `->` in `{r}`"))?;
            let l = crate::syntax::parse_term(l.trim()).map_err(|e| e.to_string())?;
            let rhs = crate::syntax::parse_term(rhs.trim()).map_err(|e| e.to_string())?;
            out.push(Rule::new(l, rhs).map_err(|e| e.to_string())?);
        }
        Trs::from_rules(out).map_err(|e| e.to_string())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// A system over a larger signature, e.g. one extended with frame names.
    pub fn with_signature(&self, signature: Signature) -> Result<Self, RuleError> {
        Trs::new(signature, self.rules.clone())
    }

    /// Union of two systems; signatures must agree on shared arities.
    pub fn union(&self, other: &Trs) -> Result<Self, RuleError> {
        let sig = self
            .signature
            .merge(&other.signature)
            .map_err(|source| RuleError::IllFormed { index: 0, source })?;
        let mut rules = self.rules.clone();
        for r in &other.rules {
            if !rules.contains(r) {
                rules.push(r.clone());
            }
        }
        Trs::new(sig, rules)
    }

    /// Root symbols of left-hand sides.
    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules.iter().filter_map(|r| r.lhs.root().cloned()).collect()
    }

    /// A symbol is a constructor when it is never the root of a lhs.
    pub fn is_constructor(&self, f: &Symbol) -> bool {
        self.rules.iter().all(|r| r.lhs.root() != Some(f))
    }

    /// Symbols occurring in the rules.
    pub fn rule_symbols(&self) -> BTreeSet<Symbol> {
        self.rules.iter().flat_map(|r| r.lhs.symbols().into_iter().chain(r.rhs.symbols())).collect()
    }

    /// `c_R = max(max |l|, ar(R) + 1)` where `ar(R)` is the largest arity of
    /// a symbol occurring in the rules.
    pub fn size_bound(&self) -> Result<TrsSize, RuleError> {
        if self.rules.is_empty() {
            return Err(RuleError::Empty);
        }
        let max_lhs = self.rules.iter().map(|r| r.lhs.size()).max().unwrap_or(0);
        let mut ar = 0;
        for r in &self.rules {
            for t in [&r.lhs, &r.rhs] {
                t.walk(&mut |s| {
                    if let Term::App(_, args) = s {
                        ar = ar.max(args.len());
                    }
                });
            }
        }
        Ok(TrsSize { c_r: max_lhs.max(ar + 1), max_lhs, max_arity: ar })
    }

    /// Rewrites at the given position, trying rules in order.
    pub fn rewrite_at(&self, t: &Term, at: &Position) -> Option<(Term, RewriteStep)> {
        let sub = t.at(at)?;
        for (i, rule) in self.rules.iter().enumerate() {
            if let Some(sigma) = match_term(&rule.lhs, sub) {
                let reduct = sigma.apply(&rule.rhs);
                let out = t.replace_at(at, reduct)?;
                return Some((out, RewriteStep { position: at.clone(), rule: i, matcher: sigma }));
            }
        }
        None
    }

    /// One rewrite step: at `at` if given, otherwise at the leftmost-innermost
    /// redex.
    pub fn rewrite_once(&self, t: &Term, at: Option<&Position>) -> Option<(Term, RewriteStep)> {
        match at {
            Some(p) => self.rewrite_at(t, p),
            None => t.positions_innermost().iter().find_map(|p| self.rewrite_at(t, p)),
        }
    }

    /// Leftmost-innermost normalization within `budget` steps.
    pub fn normalize(&self, t: &Term, budget: usize) -> Result<(Term, RewriteTrace), NormalizeError> {
        let mut cur = t.clone();
        let mut steps = Vec::new();
        loop {
            match self.rewrite_once(&cur, None) {
                None => return Ok((cur.clone(), RewriteTrace { start: t.clone(), steps, result: cur })),
                Some((next, step)) => {
                    if steps.len() == budget {
                        return Err(NormalizeError::BudgetExhausted {
                            budget,
                            partial: Box::new(RewriteTrace { start: t.clone(), steps, result: cur }),
                        });
                    }
                    steps.push(step);
                    cur = next;
                }
            }
        }
    }

    /// Normal form only, with the default budget.
    pub fn normal_form(&self, t: &Term) -> Result<Term, NormalizeError> {
        self.normalize(t, DEFAULT_NORMALIZE_BUDGET).map(|(n, _)| n)
    }

    pub fn is_normal(&self, t: &Term) -> bool {
        self.rewrite_once(t, None).is_none()
    }

    /// Per-rule shape classification for subterm convergence.
    pub fn subterm_shape(&self) -> SubtermShapeReport {
        let rules: Vec<SubtermShape> = self
            .rules
            .iter()
            .map(|r| {
                if r.lhs.has_strict_subterm(&r.rhs) {
                    SubtermShape::StrictSubterm
                } else if r.rhs.is_constant() {
                    SubtermShape::Constant
                } else {
                    SubtermShape::Neither
                }
            })
            .collect();
        let holds = rules.iter().all(|s| *s != SubtermShape::Neither);
        SubtermShapeReport { rules, holds }
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrsSize {
    pub c_r: usize,
    pub max_lhs: usize,
    pub max_arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubtermShape {
    StrictSubterm,
    Constant,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubtermShapeReport {
    pub rules: Vec<SubtermShape>,
    pub holds: bool,
}

impl SubtermShapeReport {
    /// 1-based index of the first offending rule.
    pub fn first_offender(&self) -> Option<usize> {
        self.rules.iter().position(|s| *s == SubtermShape::Neither).map(|i| i + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteStep {
    pub position: Position,
    /// 0-based index into the rule list.
    pub rule: usize,
    pub matcher: Substitution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteTrace {
    pub start: Term,
    pub steps: Vec<RewriteStep>,
    pub result: Term,
}

impl RewriteTrace {
    /// Replays the trace, checking each step against the system.
    pub fn replay(&self, trs: &Trs) -> Result<Term, String> {
        let mut cur = self.start.clone();
        for (k, s) in self.steps.iter().enumerate() {
            let rule = trs.rules().get(s.rule).ok_or_else(|| format!("step {k}: no rule {}", s.rule))?;
            let sub = cur.at(&s.position).ok_or_else(|| format!("step {k}: bad position {}", s.position))?;
            if s.matcher.apply(&rule.lhs) != *sub {
                return Err(format!("step {k}: matcher does not produce the redex"));
            }
            cur = cur
                .replace_at(&s.position, s.matcher.apply(&rule.rhs))
                .ok_or_else(|| format!("step {k}: bad position"))?;
        }
        if cur != self.result {
            return Err("replay ends in a different term".into());
        }
        Ok(cur)
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("normalization budget of {budget} steps exhausted; non-termination suspected")]
    BudgetExhausted { budget: usize, partial: Box<RewriteTrace> },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn blind() -> Trs {
        Trs::parse_rules(&[
            "checksign(sign(X,Y),pk(Y)) -> X",
            "unblind(blind(X,Y),Y) -> X",
            "unblind(sign(blind(X,Y),Z),Y) -> sign(X,Z)",
        ])
        .unwrap()
    }

    #[test]
    fn rule_validation() {
        assert!(matches!(Rule::new(t("X"), t("a")), Err(RuleError::VariableLhs(_))));
        assert!(matches!(Rule::new(t("f(X)"), t("Y")), Err(RuleError::UnboundRhsVariable { .. })));
    }

    #[test]
    fn single_steps() {
        let r = Trs::parse_rules(&["dec(enc(X,Y),Y) -> X"]).unwrap();
        let (out, _) = r.rewrite_once(&t("dec(enc(a,n),n)"), Some(&Position::root())).unwrap();
        assert_eq!(out, t("a"));
        assert!(r.rewrite_once(&t("a"), None).is_none());
        let mal = Trs::parse_rules(&["dec(enc(X,Y),Y) -> X", "mal(enc(X,Y),Z) -> enc(Z,Y)"]).unwrap();
        let (out, _) = mal.rewrite_once(&t("mal(enc(a,k),b)"), Some(&Position::root())).unwrap();
        assert_eq!(out, t("enc(b,k)"));
    }

    #[test]
    fn normalization() {
        let b = blind();
        let (nf, trace) = b.normalize(&t("unblind(sign(blind(a,b),k),b)"), 100).unwrap();
        assert_eq!(nf, t("sign(a,k)"));
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.replay(&b).unwrap(), nf);
        assert_eq!(b.normalize(&t("a"), 10).unwrap().0, t("a"));
    }

    #[test]
    fn budget_exhaustion_reports_partial_trace() {
        let r = Trs::parse_rules(&["f(X) -> f(f(X))"]).unwrap();
        match r.normalize(&t("f(a)"), 5) {
            Err(NormalizeError::BudgetExhausted { budget, partial }) => {
                assert_eq!(budget, 5);
                assert_eq!(partial.steps.len(), 5);
                assert!(partial.replay(&r).is_ok());
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn size_bounds() {
        let r = Trs::parse_rules(&["dec(enc(X,Y),Y) -> X"]).unwrap();
        assert_eq!(r.size_bound().unwrap().c_r, 5);
        assert_eq!(blind().size_bound().unwrap().c_r, 7);
        assert_eq!(Trs::parse_rules(&["f(X) -> X"]).unwrap().size_bound().unwrap().c_r, 2);
        assert!(Trs::from_rules(vec![]).unwrap().size_bound().is_err());
    }

    #[test]
    fn subterm_shapes() {
        let r = Trs::parse_rules(&["dec(enc(X,Y),Y) -> X"]).unwrap();
        assert!(r.subterm_shape().holds);
        let rep = blind().subterm_shape();
        assert!(!rep.holds);
        assert_eq!(rep.first_offender(), Some(3));
        let ss = Trs::parse_rules(&["check(sign(X,Y),pk(Y)) -> ok", "msg(sign(X,Y)) -> X"]).unwrap();
        assert_eq!(ss.subterm_shape().rules, vec![SubtermShape::Constant, SubtermShape::StrictSubterm]);
    }

    #[test]
    fn constructors() {
        let b = blind();
        assert!(b.is_constructor(&Symbol::new("sign")));
        assert!(b.is_constructor(&Symbol::new("pk")));
        assert!(!b.is_constructor(&Symbol::new("unblind")));
    }
}
