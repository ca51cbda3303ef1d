use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::deduction::KnowledgeOptions;
use super::{gst_frame, normalize_frame, Frame, KnowledgeError};
use crate::matching::{match_extend, match_term};
use crate::rewriting::Trs;
use crate::signature::Signature;
use crate::term::{Context, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    InitialRange { var: Var },
    InitialName,
    Composition,
    /// `C[M1..Ml] →ε M` with rule `rule` (0-based).
    Rewrite { rule: usize, context: Context, fillers: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SatEntry {
    pub term: Term,
    pub recipe: Term,
    pub provenance: Provenance,
}

/// A recipe for an entry other than the one kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Alternative {
    pub entry: usize,
    pub recipe: Term,
    pub by_rewrite: bool,
}

pub const MAX_ALTERNATIVES: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct SaturationState {
    pub entries: Vec<SatEntry>,
    pub alternatives: Vec<Alternative>,
    pub gst: BTreeSet<Term>,
    pub c_r: usize,
    /// Public constants available to contexts, including the fresh name.
    pub names: Vec<Term>,
    pub fresh: Symbol,
    #[serde(skip)]
    pub(crate) index: HashMap<Term, usize>,
    #[serde(skip)]
    pub(crate) sig: Signature,
}

/// How a ground instance of a rule lhs was assembled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Shape {
    Hole(Term),
    Name(Term),
    Node(Symbol, Vec<Shape>),
    /// A variable leaf whose value is chosen after the rest of the shape.
    Deferred(Var),
}

impl Shape {
    pub(crate) fn context(&self) -> (Context, Vec<Term>) {
        fn go(s: &Shape, fillers: &mut Vec<Term>) -> Term {
            match s {
                Shape::Hole(t) => {
                    fillers.push(t.clone());
                    Context::hole(fillers.len())
                }
                Shape::Name(t) => t.clone(),
                Shape::Node(f, kids) => Term::App(f.clone(), kids.iter().map(|k| go(k, fillers)).collect()),
                Shape::Deferred(x) => unreachable!("deferred leaf {x} left in a finished shape"),
            }
        }
        let mut fillers = Vec::new();
        let t = go(self, &mut fillers);
        (Context::new(t).expect("holes are numbered apart"), fillers)
    }
}

impl Shape {
    fn deferred(&self, out: &mut Vec<Var>) {
        match self {
            Shape::Deferred(x) => out.push(x.clone()),
            Shape::Node(_, kids) => kids.iter().for_each(|k| k.deferred(out)),
            _ => {}
        }
    }

    fn fill_deferred(&self, pick: &BTreeMap<Var, (usize, Term, Shape)>) -> Shape {
        match self {
            Shape::Deferred(x) => pick[x].2.clone(),
            Shape::Node(f, kids) => Shape::Node(f.clone(), kids.iter().map(|k| k.fill_deferred(pick)).collect()),
            other => other.clone(),
        }
    }
}

/// Stands in for a deferred leaf inside a recipe. Frame variables never
/// start with `?`.
fn deferred_marker(x: &Var) -> Term {
    Term::Var(Var::new(&format!("?{x}")))
}

fn fill_deferred_recipe(r: &Term, pick: &BTreeMap<Var, (usize, Term, Shape)>) -> Term {
    match r {
        Term::Var(v) => match v.as_str().strip_prefix('?') {
            Some(x) => pick[&Var::new(x)].1.clone(),
            None => r.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| fill_deferred_recipe(a, pick)).collect()),
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Sol {
    pub binds: BTreeMap<Var, Term>,
    pub cost: usize,
    pub recipe: Term,
    pub shape: Shape,
}

/// Smallest first, ties by the term order.
pub(crate) fn better(a: &Term, b: &Term) -> bool {
    (a.size(), a) < (b.size(), b)
}

impl SaturationState {
    pub fn contains(&self, t: &Term) -> bool {
        self.index.contains_key(t)
    }

    pub fn recipe(&self, t: &Term) -> Option<&Term> {
        self.index.get(t).map(|&i| &self.entries[i].recipe)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.entries.iter().map(|e| &e.term)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub(crate) fn is_public(&self, f: &Symbol) -> bool {
        self.sig.is_public(f)
    }

    fn offer(&mut self, term: &Term, recipe: Term, provenance: Provenance) -> bool {
        let by_rewrite = matches!(provenance, Provenance::Rewrite { .. });
        match self.index.get(term) {
            None => {
                self.index.insert(term.clone(), self.entries.len());
                self.entries.push(SatEntry { term: term.clone(), recipe, provenance });
                true
            }
            Some(&i) => {
                let cur = &self.entries[i].recipe;
                if *cur == recipe || self.alternatives.iter().any(|a| a.entry == i && a.recipe == recipe) {
                    return false;
                }
                if better(&recipe, cur) {
                    let old = std::mem::replace(&mut self.entries[i], SatEntry { term: term.clone(), recipe, provenance });
                    let old_rw = matches!(old.provenance, Provenance::Rewrite { .. });
                    self.push_alternative(i, old.recipe, old_rw);
                    true
                } else {
                    self.push_alternative(i, recipe, by_rewrite);
                    false
                }
            }
        }
    }

    fn push_alternative(&mut self, entry: usize, recipe: Term, by_rewrite: bool) {
        let count = self.alternatives.iter().filter(|a| a.entry == entry).count();
        if count < MAX_ALTERNATIVES {
            self.alternatives.push(Alternative { entry, recipe, by_rewrite });
        }
    }

    /// Cheapest way to assemble the ground term `g`: a hole, a public name,
    /// or a public symbol over assembled arguments.
    pub(crate) fn cost_ground(&self, g: &Term) -> Option<(usize, Term, Shape)> {
        if let Some(r) = self.recipe(g) {
            return Some((1, r.clone(), Shape::Hole(g.clone())));
        }
        match g {
            Term::App(f, args) if self.is_public(f) => {
                if args.is_empty() {
                    return Some((1, g.clone(), Shape::Name(g.clone())));
                }
                let mut cost = 1;
                let mut recipes = Vec::new();
                let mut shapes = Vec::new();
                for a in args {
                    let (c, r, s) = self.cost_ground(a)?;
                    cost += c;
                    recipes.push(r);
                    shapes.push(s);
                }
                Some((cost, Term::App(f.clone(), recipes), Shape::Node(f.clone(), shapes)))
            }
            _ => None,
        }
    }

    /// Every way to instantiate pattern `p` (extending `binds`) as a context
    /// over saturation entries and public names of total size at most
    /// `budget`.
    pub(crate) fn instances(&self, p: &Term, binds: &BTreeMap<Var, Term>, budget: usize, out: &mut Vec<Sol>) {
        self.instances_pruned(p, binds, budget, false, out)
    }

    /// Like `instances`, but only guaranteed to contain the `keep` smallest
    /// recipes. Variable leaves are deferred until the rest of the shape is
    /// fixed; a variable that is then still unbound only occurs as a leaf, so
    /// any choice outside its `keep` cheapest candidates is beaten by `keep`
    /// distinct smaller recipes.
    pub(crate) fn instances_smallest(&self, p: &Term, binds: &BTreeMap<Var, Term>, budget: usize, keep: usize, out: &mut Vec<Sol>) {
        let mut partial = Vec::new();
        self.instances_pruned(p, binds, budget, true, &mut partial);
        let mut cands: Vec<(Term, Term, Shape)> = self
            .entries
            .iter()
            .map(|e| (e.term.clone(), e.recipe.clone(), Shape::Hole(e.term.clone())))
            .chain(self.names.iter().filter(|n| !self.contains(n)).map(|n| (n.clone(), n.clone(), Shape::Name(n.clone()))))
            .collect();
        cands.sort_by(|a, b| (a.1.size(), &a.1).cmp(&(b.1.size(), &b.1)));
        cands.truncate(keep);
        for sol in partial {
            let mut deferred = Vec::new();
            sol.shape.deferred(&mut deferred);
            let free: Vec<Var> = deferred.iter().filter(|x| !sol.binds.contains_key(*x)).cloned().collect::<BTreeSet<_>>().into_iter().collect();
            let mut fixed: BTreeMap<Var, (usize, Term, Shape)> = BTreeMap::new();
            let mut ok = true;
            for x in deferred.iter().filter(|x| sol.binds.contains_key(*x)) {
                match self.cost_ground(&sol.binds[x]) {
                    Some(c) => {
                        fixed.insert(x.clone(), c);
                    }
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let mut choice = vec![0usize; free.len()];
            loop {
                if free.is_empty() || !cands.is_empty() {
                    let mut pick = fixed.clone();
                    let mut binds = sol.binds.clone();
                    for (x, &i) in free.iter().zip(&choice) {
                        let (t, r, sh) = &cands[i];
                        pick.insert(x.clone(), (1, r.clone(), sh.clone()));
                        binds.insert(x.clone(), t.clone());
                    }
                    let extra: usize = deferred.iter().map(|x| pick[x].0 - 1).sum();
                    if sol.cost + extra <= budget {
                        out.push(Sol {
                            binds,
                            cost: sol.cost + extra,
                            recipe: fill_deferred_recipe(&sol.recipe, &pick),
                            shape: sol.shape.fill_deferred(&pick),
                        });
                    }
                }
                let mut k = free.len();
                let mut done = true;
                while k > 0 {
                    k -= 1;
                    choice[k] += 1;
                    if choice[k] < cands.len() {
                        done = false;
                        break;
                    }
                    choice[k] = 0;
                }
                if done {
                    break;
                }
            }
        }
    }

    fn instances_pruned(
        &self,
        p: &Term,
        binds: &BTreeMap<Var, Term>,
        budget: usize,
        defer: bool,
        out: &mut Vec<Sol>,
    ) {
        if budget == 0 {
            return;
        }
        match p {
            Term::Var(x) => {
                if let Some(g) = binds.get(x) {
                    if let Some((cost, recipe, shape)) = self.cost_ground(g) {
                        if cost <= budget {
                            out.push(Sol { binds: binds.clone(), cost, recipe, shape });
                        }
                    }
                    return;
                }
                if defer {
                    out.push(Sol { binds: binds.clone(), cost: 1, recipe: deferred_marker(x), shape: Shape::Deferred(x.clone()) });
                    return;
                }
                let mut cands: Vec<Sol> = Vec::new();
                for e in &self.entries {
                    let mut b = binds.clone();
                    b.insert(x.clone(), e.term.clone());
                    cands.push(Sol { binds: b, cost: 1, recipe: e.recipe.clone(), shape: Shape::Hole(e.term.clone()) });
                }
                for n in &self.names {
                    if self.contains(n) {
                        continue;
                    }
                    let mut b = binds.clone();
                    b.insert(x.clone(), n.clone());
                    cands.push(Sol { binds: b, cost: 1, recipe: n.clone(), shape: Shape::Name(n.clone()) });
                }
                out.extend(cands);
            }
            Term::App(f, args) => {
                for e in &self.entries {
                    if let Some(b) = match_extend(p, &e.term, binds) {
                        out.push(Sol { binds: b, cost: 1, recipe: e.recipe.clone(), shape: Shape::Hole(e.term.clone()) });
                    }
                }
                if !self.is_public(f) {
                    return;
                }
                if args.is_empty() {
                    if !self.contains(p) {
                        out.push(Sol { binds: binds.clone(), cost: 1, recipe: p.clone(), shape: Shape::Name(p.clone()) });
                    }
                    return;
                }
                let mut partial: Vec<Partial> =
                    vec![(binds.clone(), 1, Vec::new(), Vec::new())];
                for (k, a) in args.iter().enumerate() {
                    let still = args.len() - k - 1;
                    let mut next = Vec::new();
                    for (b, cost, rs, ss) in partial {
                        if cost + still + 1 > budget {
                            continue;
                        }
                        let mut sub = Vec::new();
                        self.instances_pruned(a, &b, budget - cost - still, defer, &mut sub);
                        for s in sub {
                            let mut rs = rs.clone();
                            let mut ss = ss.clone();
                            rs.push(s.recipe);
                            ss.push(s.shape);
                            next.push((s.binds, cost + s.cost, rs, ss));
                        }
                    }
                    partial = next;
                }
                for (b, cost, rs, ss) in partial {
                    out.push(Sol {
                        binds: b,
                        cost,
                        recipe: Term::App(f.clone(), rs),
                        shape: Shape::Node(f.clone(), ss),
                    });
                }
            }
        }
    }

    /// Replays every recipe against the frame.
    pub fn verify(&self, trs: &Trs, frame: &Frame, budget: usize) -> Result<(), String> {
        for e in &self.entries {
            if !super::recipe_is_admissible(frame, &e.recipe) {
                return Err(format!("recipe {} for {} uses a restricted name", e.recipe, e.term));
            }
            let got = trs.normalize(&frame.apply(&e.recipe), budget).map_err(|e| e.to_string())?.0;
            if got != e.term {
                return Err(format!("recipe {} yields {got}, not {}", e.recipe, e.term));
            }
        }
        for a in &self.alternatives {
            let term = &self.entries[a.entry].term;
            let got = trs.normalize(&frame.apply(&a.recipe), budget).map_err(|e| e.to_string())?.0;
            if got != *term || !super::recipe_is_admissible(frame, &a.recipe) {
                return Err(format!("alternative recipe {} does not yield {term}", a.recipe));
            }
        }
        Ok(())
    }
}

/// Picks a public name that occurs nowhere in `sig`.
pub(crate) fn fresh_name(sig: &Signature, preferred: &str) -> Symbol {
    let mut name = preferred.to_string();
    while sig.contains(&Symbol::new(&name)) {
        name.push('\'');
    }
    Symbol::new(&name)
}

/// Bindings, cost, argument recipes and shapes built so far.
type Partial = (BTreeMap<Var, Term>, usize, Vec<Term>, Vec<Shape>);

/// Least fixed point of the two closure rules, seeded with the frame's range
/// and free names.
pub fn saturate(frame: &Frame, trs: &Trs, opts: &KnowledgeOptions) -> Result<SaturationState, KnowledgeError> {
    let frame = normalize_frame(frame, trs, opts.normalize_budget)?;
    let mut sig = frame.signature_with(trs)?;
    frame.check_against(&sig)?;
    let fresh = match &opts.fresh_name {
        Some(n) => Symbol::new(n),
        None => fresh_name(&sig, "fresh"),
    };
    let gst = gst_frame(&sig, &frame, opts.gst_cap)?;
    if !sig.contains(&fresh) {
        sig.declare(fresh.as_str(), 0, true)?;
    }
    let mut names: Vec<Term> = sig
        .iter()
        .filter(|(f, i)| i.arity == 0 && i.public && !frame.is_restricted(f))
        .map(|(f, _)| Term::App(f.clone(), vec![]))
        .collect();
    names.sort();
    let c_r = trs.size_bound().map(|s| s.c_r).unwrap_or(1);
    let mut st = SaturationState {
        entries: Vec::new(),
        alternatives: Vec::new(),
        gst,
        c_r,
        names,
        fresh,
        index: HashMap::new(),
        sig,
    };
    for (x, t) in frame.bindings() {
        st.offer(t, Term::Var(x.clone()), Provenance::InitialRange { var: x.clone() });
    }
    for c in frame.free_names() {
        let t = Term::App(c, vec![]);
        st.offer(&t, t.clone(), Provenance::InitialName);
    }
    let gst: Vec<Term> = st.gst.iter().filter(|m| trs.is_normal(m)).cloned().collect();
    loop {
        let mut changed = false;
        for m in &gst {
            let Term::App(f, args) = m else { continue };
            if !st.is_public(f) {
                continue;
            }
            let recipes: Option<Vec<Term>> = args.iter().map(|a| st.recipe(a).cloned()).collect();
            if let Some(rs) = recipes {
                changed |= st.offer(m, Term::App(f.clone(), rs), Provenance::Composition);
            }
        }
        for (i, rule) in trs.rules().iter().enumerate() {
            for m in &gst {
                let Some(theta) = match_term(&rule.rhs, m) else { continue };
                let binds: BTreeMap<Var, Term> = theta.iter().map(|(x, t)| (x.clone(), t.clone())).collect();
                let mut sols = Vec::new();
                st.instances_smallest(&rule.lhs, &binds, c_r, MAX_ALTERNATIVES + 1, &mut sols);
                sols.sort_by(|a, b| (a.recipe.size(), &a.recipe).cmp(&(b.recipe.size(), &b.recipe)));
                sols.dedup_by(|a, b| a.recipe == b.recipe);
                for s in sols.into_iter().take(MAX_ALTERNATIVES + 1) {
                    let (context, fillers) = s.shape.context();
                    changed |= st.offer(m, s.recipe, Provenance::Rewrite { rule: i, context, fillers });
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(st)
}
