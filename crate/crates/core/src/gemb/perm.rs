//! Root-argument permutations, leaf bijections and their composition.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Serialize;

use super::GembError;
use crate::term::Term;

pub const MAX_PERMUTED_ARITY: usize = 8;

/// `t ≈_s u`: equal leaves, or the same root with permuted direct arguments.
pub fn subterm_perm_eq(t: &Term, u: &Term) -> bool {
    match (t, u) {
        (Term::App(f, ts), Term::App(g, us)) if f == g && ts.len() == us.len() => {
            let mut a = ts.clone();
            let mut b = us.clone();
            a.sort();
            b.sort();
            a == b
        }
        _ => t == u,
    }
}

fn leaves(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    t.walk(&mut |s| {
        if s.is_leaf() {
            out.insert(s.clone());
        }
    });
    out
}

#[derive(Default, Clone)]
struct LeafMap {
    fwd: BTreeMap<Term, Term>,
    bwd: BTreeMap<Term, Term>,
}

impl LeafMap {
    fn extend(&mut self, t: &Term, u: &Term, cross_kind: bool) -> bool {
        if t.is_leaf() {
            if !u.is_leaf() || (!cross_kind && t.is_var() != u.is_var()) {
                return false;
            }
            let a = self.fwd.entry(t.clone()).or_insert_with(|| u.clone()) == u;
            let b = self.bwd.entry(u.clone()).or_insert_with(|| t.clone()) == t;
            return a && b;
        }
        match (t, u) {
            (Term::App(f, ts), Term::App(g, us)) if f == g && ts.len() == us.len() => {
                ts.iter().zip(us).all(|(a, b)| self.extend(a, b, cross_kind))
            }
            _ => false,
        }
    }

    fn into_pairs(self) -> Vec<(Term, Term)> {
        self.fwd.into_iter().collect()
    }
}

/// A bijection on the leaves of a term, as `(from, to)` pairs.
pub type LeafBijection = Vec<(Term, Term)>;

/// `t ≈_l u`: a bijection π on the variables and constants of `t` with
/// `tπ = u`. By default π maps variables to variables and constants to
/// constants; `cross_kind` lifts that restriction.
pub fn leaf_perm_eq(t: &Term, u: &Term, cross_kind: bool) -> Option<LeafBijection> {
    if leaves(t) != leaves(u) {
        return None;
    }
    let mut m = LeafMap::default();
    m.extend(t, u, cross_kind).then(|| m.into_pairs())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermWitness {
    /// Argument `j` of the intermediate term is argument `root_permutation[j]`
    /// of the original (1-based). Empty for leaves.
    pub root_permutation: Vec<usize>,
    pub bijection: LeafBijection,
}

impl PermWitness {
    /// Applies the witness to `t`.
    pub fn apply(&self, t: &Term) -> Option<Term> {
        let mid = match t {
            Term::App(f, args) if !self.root_permutation.is_empty() => {
                if self.root_permutation.len() != args.len() {
                    return None;
                }
                let mut out = Vec::with_capacity(args.len());
                for &i in &self.root_permutation {
                    out.push(args.get(i.checked_sub(1)?)?.clone());
                }
                Term::App(f.clone(), out)
            }
            _ => t.clone(),
        };
        let map: BTreeMap<&Term, &Term> = self.bijection.iter().map(|(a, b)| (a, b)).collect();
        Some(rename_leaves(&mid, &map))
    }
}

fn rename_leaves(t: &Term, map: &BTreeMap<&Term, &Term>) -> Term {
    if t.is_leaf() {
        return map.get(t).map(|u| (*u).clone()).unwrap_or_else(|| t.clone());
    }
    match t {
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| rename_leaves(a, map)).collect()),
        Term::Var(_) => t.clone(),
    }
}

/// `t ≈ u`: a root-argument permutation followed by a leaf bijection.
pub fn perm_eq(t: &Term, u: &Term, cross_kind: bool) -> Result<Option<PermWitness>, GembError> {
    if t.size() != u.size() || leaves(t) != leaves(u) {
        return Ok(None);
    }
    match (t, u) {
        (Term::App(f, ts), Term::App(g, us)) if !ts.is_empty() => {
            if f != g || ts.len() != us.len() {
                return Ok(None);
            }
            if ts.len() > MAX_PERMUTED_ARITY {
                return Err(GembError::RootArityTooLarge(ts.len()));
            }
            let mut used = vec![false; ts.len()];
            let mut perm = Vec::with_capacity(ts.len());
            Ok(assign(ts, us, 0, &mut used, &mut perm, LeafMap::default(), cross_kind)
                .map(|(perm, m)| PermWitness { root_permutation: perm, bijection: m.into_pairs() }))
        }
        _ => {
            let mut m = LeafMap::default();
            Ok(m.extend(t, u, cross_kind).then(|| PermWitness { root_permutation: vec![], bijection: m.into_pairs() }))
        }
    }
}

fn assign(
    ts: &[Term],
    us: &[Term],
    j: usize,
    used: &mut Vec<bool>,
    perm: &mut Vec<usize>,
    map: LeafMap,
    cross_kind: bool,
) -> Option<(Vec<usize>, LeafMap)> {
    if j == us.len() {
        return Some((perm.clone(), map));
    }
    for i in 0..ts.len() {
        if used[i] {
            continue;
        }
        let mut m = map.clone();
        if !m.extend(&ts[i], &us[j], cross_kind) {
            continue;
        }
        used[i] = true;
        perm.push(i + 1);
        if let Some(found) = assign(ts, us, j + 1, used, perm, m, cross_kind) {
            return Some(found);
        }
        perm.pop();
        used[i] = false;
    }
    None
}

/// Every term `u` with `t ≈ u`.
pub fn perm_class(t: &Term, cross_kind: bool) -> Result<BTreeSet<Term>, GembError> {
    let roots: Vec<Term> = match t {
        Term::App(f, args) if !args.is_empty() => {
            if args.len() > MAX_PERMUTED_ARITY {
                return Err(GembError::RootArityTooLarge(args.len()));
            }
            let set: BTreeSet<Term> =
                args.iter().cloned().permutations(args.len()).map(|p| Term::App(f.clone(), p)).collect();
            set.into_iter().collect()
        }
        _ => vec![t.clone()],
    };
    let ls: Vec<Term> = leaves(t).into_iter().collect();
    let bijections: Vec<BTreeMap<&Term, &Term>> = if cross_kind {
        ls.iter().permutations(ls.len()).map(|p| ls.iter().zip(p).collect()).collect()
    } else {
        let vars: Vec<&Term> = ls.iter().filter(|l| l.is_var()).collect();
        let consts: Vec<&Term> = ls.iter().filter(|l| !l.is_var()).collect();
        let mut out = Vec::new();
        for pv in vars.iter().copied().permutations(vars.len()) {
            for pc in consts.iter().copied().permutations(consts.len()) {
                let mut m = BTreeMap::new();
                m.extend(vars.iter().copied().zip(pv.iter().copied()));
                m.extend(consts.iter().copied().zip(pc.iter().copied()));
                out.push(m);
            }
        }
        out
    };
    let mut out = BTreeSet::new();
    for r in &roots {
        for b in &bijections {
            out.insert(rename_leaves(r, b));
        }
    }
    Ok(out)
}
