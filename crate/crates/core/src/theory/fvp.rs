use serde::Serialize;

use crate::contracting::{check_strictly_contracting, ContractingError};
use crate::matching::{is_variant, rename_apart, unify};
use crate::rewriting::{check_convergent, ConvergenceBudgets, ConvergenceVerdict, Rule, Trs};
use crate::term::Term;

pub const DEFAULT_FORWARD_CLOSURE_BOUND: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum FvpVerdict {
    Yes,
    NotApplicable { reason: String },
}

/// Strictly contracting, convergent, and every rhs a variable or rooted by
/// a constructor: then the system has finite variants.
pub fn fvp_sufficient(trs: &Trs, budgets: &ConvergenceBudgets) -> Result<FvpVerdict, ContractingError> {
    if !check_strictly_contracting(trs)? {
        return Ok(FvpVerdict::NotApplicable { reason: "not strictly contracting".into() });
    }
    match check_convergent(trs, budgets) {
        ConvergenceVerdict::Yes { .. } => {}
        v => return Ok(FvpVerdict::NotApplicable { reason: format!("convergence not established: {}", short(&v)) }),
    }
    for (i, r) in trs.rules().iter().enumerate() {
        if let Term::App(f, _) = &r.rhs {
            if !trs.is_constructor(f) {
                return Ok(FvpVerdict::NotApplicable {
                    reason: format!("rule {} has rhs rooted by the defined symbol {f}", i + 1),
                });
            }
        }
    }
    Ok(FvpVerdict::Yes)
}

fn short(v: &ConvergenceVerdict) -> &'static str {
    match v {
        ConvergenceVerdict::Yes { .. } => "yes",
        ConvergenceVerdict::No { .. } => "no",
        ConvergenceVerdict::Unknown { .. } => "unknown",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ForwardClosure {
    Closed { rules: Vec<Rule>, iterations: usize },
    Unknown { rules_at_bound: usize, bound: usize },
}

fn pair(r: &Rule) -> Term {
    Term::app("→", vec![r.lhs.clone(), r.rhs.clone()])
}

/// Iterates forward overlaps: a rhs non-variable subterm unified with an
/// original lhs yields `l1θ → r1θ[r2θ]`. Closed when a round adds nothing
/// new up to variable renaming.
pub fn forward_closure_bounded(trs: &Trs, bound: usize) -> ForwardClosure {
    let base: Vec<Rule> = trs.rules().to_vec();
    let mut all: Vec<Rule> = base.clone();
    let mut frontier: Vec<Rule> = base.clone();
    for iteration in 1..=bound {
        let mut fresh: Vec<Rule> = Vec::new();
        for r1 in &frontier {
            let l1 = rename_apart(&r1.lhs, "_a");
            let rhs1 = rename_apart(&r1.rhs, "_a");
            for p in rhs1.positions() {
                let sub = rhs1.at(&p).expect("own position");
                if sub.is_var() {
                    continue;
                }
                for r2 in &base {
                    let l2 = rename_apart(&r2.lhs, "_b");
                    let Some(theta) = unify(sub, &l2) else { continue };
                    let r2b = rename_apart(&r2.rhs, "_b");
                    let new_rhs = theta.apply(&rhs1).replace_at(&p, theta.apply(&r2b)).expect("own position");
                    let Ok(rule) = Rule::new(theta.apply(&l1), new_rhs) else { continue };
                    let rule = canonical(&rule);
                    let key = pair(&rule);
                    if all.iter().chain(&fresh).any(|r| is_variant(&pair(r), &key)) {
                        continue;
                    }
                    fresh.push(rule);
                }
            }
        }
        if fresh.is_empty() {
            return ForwardClosure::Closed { rules: all, iterations: iteration };
        }
        all.extend(fresh.iter().cloned());
        frontier = fresh;
    }
    ForwardClosure::Unknown { rules_at_bound: all.len(), bound }
}

/// Renames variables to `X1, X2, ...` in order of first occurrence.
fn canonical(r: &Rule) -> Rule {
    let order = pair(r).vars_ordered();
    let mut map = std::collections::BTreeMap::new();
    for (i, v) in order.iter().enumerate() {
        map.insert(v.clone(), crate::term::Var::new(&format!("X{}", i + 1)));
    }
    let mut f = |v: &crate::term::Var| map[v].clone();
    let lhs = r.lhs.rename_vars(&mut f);
    let rhs = r.rhs.rename_vars(&mut f);
    Rule::new(lhs, rhs).expect("renaming keeps rules valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trs(rules: &[&str]) -> Trs {
        Trs::parse_rules(rules).unwrap()
    }

    #[test]
    fn closure_examples() {
        let dec = trs(&["dec(enc(X,Y),Y) -> X"]);
        assert!(matches!(forward_closure_bounded(&dec, 5), ForwardClosure::Closed { iterations: 1, .. }));
        let blind = trs(&[
            "checksign(sign(X,Y),pk(Y)) -> X",
            "unblind(blind(X,Y),Y) -> X",
            "unblind(sign(blind(X,Y),Z),Y) -> sign(X,Z)",
        ]);
        match forward_closure_bounded(&blind, 5) {
            ForwardClosure::Closed { iterations, rules } => {
                assert!(iterations <= 2);
                assert_eq!(rules.len(), 3);
            }
            v => panic!("{v:?}"),
        }
        let add = trs(&["plus(X,s(Y)) -> plus(s(X),Y)", "plus(X,0) -> X", "pred(s(X)) -> X"]);
        assert!(matches!(forward_closure_bounded(&add, 5), ForwardClosure::Unknown { bound: 5, .. }));
    }

    #[test]
    fn overlap_produces_composed_rule() {
        let t = trs(&["f(X) -> g(X)", "g(a) -> b"]);
        match forward_closure_bounded(&t, 5) {
            ForwardClosure::Closed { rules, .. } => {
                let want = Rule::new(Term::app("f", vec![Term::constant("a")]), Term::constant("b")).unwrap();
                assert!(rules.contains(&want), "{rules:?}");
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn sufficient_condition() {
        let b = ConvergenceBudgets::default();
        let blind = trs(&[
            "checksign(sign(X,Y),pk(Y)) -> X",
            "unblind(blind(X,Y),Y) -> X",
            "unblind(sign(blind(X,Y),Z),Y) -> sign(X,Z)",
        ]);
        assert_eq!(fvp_sufficient(&blind, &b).unwrap(), FvpVerdict::Yes);
        let add = trs(&["plus(X,s(Y)) -> plus(s(X),Y)", "plus(X,0) -> X", "pred(s(X)) -> X"]);
        assert!(matches!(fvp_sufficient(&add, &b).unwrap(), FvpVerdict::NotApplicable { .. }));
    }
}
