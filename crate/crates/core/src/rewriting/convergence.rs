use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{critical_pairs, CriticalPair, NormalizeError, Trs};
use crate::matching::match_term;
use crate::term::{Position, Substitution, Symbol, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvergenceBudgets {
    /// Step budget for normalizing critical-pair reducts.
    pub normalize_steps: usize,
    /// Variables of each lhs are instantiated with ground terms up to this size.
    pub instance_size: usize,
    /// Maximum number of ground lhs instances explored.
    pub max_instances: usize,
    /// Maximum number of distinct terms visited during exploration.
    pub exploration_nodes: usize,
}

impl Default for ConvergenceBudgets {
    fn default() -> Self {
        ConvergenceBudgets { normalize_steps: 1_000, instance_size: 3, max_instances: 20_000, exploration_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TerminationEvidence {
    /// Every rule removes function nodes and never duplicates a variable, so
    /// every rewrite step shrinks the term.
    SizeDecreasing,
    /// All ground lhs instances up to the size bound reach normal forms along
    /// every rewrite path.
    BoundedExploration { instance_size: usize, instances: usize, visited: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NonConvergenceWitness {
    /// The lhs matches a subterm of its own rhs, giving an infinite chain.
    Loop { rule: usize, position: Position, matcher: Substitution },
    /// A cycle in the rewrite graph of some term.
    Cycle { terms: Vec<Term> },
    /// A critical pair whose reducts have distinct normal forms.
    NonJoinable { pair: CriticalPair, left_normal: Term, right_normal: Term },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    Yes { termination: TerminationEvidence, critical_pairs: usize },
    No { witness: NonConvergenceWitness },
    Unknown { reason: String },
}

impl ConvergenceVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, ConvergenceVerdict::Yes { .. })
    }
}

/// Tri-state convergence check: joinability of critical pairs plus a
/// termination certificate.
pub fn check_convergent(trs: &Trs, budgets: &ConvergenceBudgets) -> ConvergenceVerdict {
    for (i, rule) in trs.rules().iter().enumerate() {
        for p in rule.rhs.positions() {
            let sub = rule.rhs.at(&p).expect("position from term");
            if sub.is_var() {
                continue;
            }
            if let Some(matcher) = match_term(&rule.lhs, sub) {
                return ConvergenceVerdict::No { witness: NonConvergenceWitness::Loop { rule: i, position: p, matcher } };
            }
        }
    }

    let pairs = critical_pairs(trs);
    let mut unjoined = None;
    for cp in &pairs {
        let l = trs.normalize(&cp.left, budgets.normalize_steps);
        let r = trs.normalize(&cp.right, budgets.normalize_steps);
        match (l, r) {
            (Ok((ln, _)), Ok((rn, _))) => {
                if ln != rn {
                    return ConvergenceVerdict::No {
                        witness: NonConvergenceWitness::NonJoinable { pair: cp.clone(), left_normal: ln, right_normal: rn },
                    };
                }
            }
            (Err(NormalizeError::BudgetExhausted { .. }), _) | (_, Err(NormalizeError::BudgetExhausted { .. })) => {
                unjoined.get_or_insert_with(|| cp.peak.clone());
            }
        }
    }

    let termination = if size_decreasing(trs) {
        TerminationEvidence::SizeDecreasing
    } else {
        match explore(trs, budgets) {
            Exploration::Halts { instances, visited } => {
                TerminationEvidence::BoundedExploration { instance_size: budgets.instance_size, instances, visited }
            }
            Exploration::Cycle(terms) => {
                return ConvergenceVerdict::No { witness: NonConvergenceWitness::Cycle { terms } };
            }
            Exploration::OverBudget(reason) => return ConvergenceVerdict::Unknown { reason },
        }
    };
    if let Some(peak) = unjoined {
        return ConvergenceVerdict::Unknown {
            reason: format!("critical pair from peak {peak} not joined within the step budget"),
        };
    }
    ConvergenceVerdict::Yes { termination, critical_pairs: pairs.len() }
}

/// Every rule has fewer function nodes on the right and no variable occurs
/// more often on the right than on the left.
fn size_decreasing(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| {
        let (ml, mr) = (r.lhs.measures(), r.rhs.measures());
        mr.fp < ml.fp && r.rhs.vars().iter().all(|x| r.rhs.occurrences(x) <= r.lhs.occurrences(x))
    })
}

enum Exploration {
    Halts { instances: usize, visited: usize },
    Cycle(Vec<Term>),
    OverBudget(String),
}

/// Ground terms up to `max_size` over `symbols`, bucketed by size.
pub(crate) fn ground_terms_by_size(symbols: &[(Symbol, usize)], max_size: usize, cap: usize) -> Option<Vec<Vec<Term>>> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size + 1];
    let mut total = 0usize;
    for n in 1..=max_size {
        let mut layer = Vec::new();
        for (f, ar) in symbols {
            if *ar == 0 {
                if n == 1 {
                    layer.push(Term::App(f.clone(), vec![]));
                }
                continue;
            }
            if n < ar + 1 {
                continue;
            }
            for sizes in compositions(n - 1, *ar) {
                let mut partial: Vec<Vec<Term>> = vec![vec![]];
                for s in sizes {
                    let mut next = Vec::new();
                    for p in &partial {
                        for c in &by_size[s] {
                            let mut q = p.clone();
                            q.push(c.clone());
                            next.push(q);
                        }
                    }
                    partial = next;
                    if partial.len() > cap {
                        return None;
                    }
                }
                layer.extend(partial.into_iter().map(|args| Term::App(f.clone(), args)));
            }
        }
        total += layer.len();
        if total > cap {
            return None;
        }
        by_size[n] = layer;
    }
    Some(by_size)
}

/// Ordered ways to write `n` as a sum of `k` positive parts.
pub(crate) fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn explore(trs: &Trs, budgets: &ConvergenceBudgets) -> Exploration {
    let mut symbols: Vec<(Symbol, usize)> = trs.signature().iter().map(|(f, i)| (f.clone(), i.arity)).collect();
    symbols.push((Symbol::new("_k"), 0));
    let Some(by_size) = ground_terms_by_size(&symbols, budgets.instance_size, budgets.max_instances) else {
        return Exploration::OverBudget("too many ground instances".into());
    };
    let fillers: Vec<&Term> = by_size.iter().flatten().collect();

    let mut state: HashMap<Term, bool> = HashMap::new(); // false = on stack, true = done
    let mut instances = 0usize;
    for rule in trs.rules() {
        let vars = rule.lhs.vars_ordered();
        let mut idx = vec![0usize; vars.len()];
        loop {
            instances += 1;
            if instances > budgets.max_instances {
                return Exploration::OverBudget("too many ground instances".into());
            }
            let s: Substitution = vars.iter().cloned().zip(idx.iter().map(|&i| fillers[i].clone())).collect();
            let start = s.apply(&rule.lhs);
            let mut path = Vec::new();
            match dfs(trs, &start, &mut state, &mut path, budgets.exploration_nodes) {
                Ok(()) => {}
                Err(e) => return e,
            }
            // odometer over filler choices
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < fillers.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Exploration::Halts { instances, visited: state.len() }
}

fn dfs(trs: &Trs, t: &Term, state: &mut HashMap<Term, bool>, path: &mut Vec<Term>, budget: usize) -> Result<(), Exploration> {
    match state.get(t) {
        Some(true) => return Ok(()),
        Some(false) => {
            let start = path.iter().position(|u| u == t).unwrap_or(0);
            let mut cycle = path[start..].to_vec();
            cycle.push(t.clone());
            return Err(Exploration::Cycle(cycle));
        }
        None => {}
    }
    if state.len() >= budget {
        return Err(Exploration::OverBudget(format!("exploration visited more than {budget} terms")));
    }
    state.insert(t.clone(), false);
    path.push(t.clone());
    for u in all_reducts(trs, t) {
        dfs(trs, &u, state, path, budget)?;
    }
    path.pop();
    state.insert(t.clone(), true);
    Ok(())
}

/// Every one-step reduct of `t`, deduplicated.
pub fn all_reducts(trs: &Trs, t: &Term) -> Vec<Term> {
    let mut out: BTreeMap<Term, ()> = BTreeMap::new();
    for p in t.positions() {
        let sub = t.at(&p).expect("position from term");
        for rule in trs.rules() {
            if let Some(s) = match_term(&rule.lhs, sub) {
                out.insert(t.replace_at(&p, s.apply(&rule.rhs)).expect("position from term"), ());
            }
        }
    }
    out.into_keys().collect()
}
