//! Projecting rules, projection-closed derivations and permutative
//! equalities, and the contracting class checks.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::gemb::{apply_gemb_step, gemb_successors, perm_eq, GembError, GembRule, GembStep, PermWitness};
use crate::rewriting::{SubtermShape, Trs};
use crate::term::{Position, Substitution, Term, Var};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum ContractingError {
    #[error("variable {var} occurs {count} times in {term}, expected exactly once")]
    NotSingleOccurrence { var: Var, term: Term, count: usize },
    #[error("{lhs} and {rhs} are not permutatively equal")]
    NotPermEqual { lhs: Term, rhs: Term },
    #[error(transparent)]
    Gemb(#[from] GembError),
}

/// A rule `l0 → v` whose lhs, renamed, contains the guarded term `t` at
/// `position` with `v` renamed to the projected variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectingWitness {
    /// 0-based rule index.
    pub rule: usize,
    pub position: Position,
    /// Renaming of the rule's variables occurring under `position`.
    pub renaming: Substitution,
    pub guarded: Term,
    pub variable: Var,
}

impl ProjectingWitness {
    pub fn validate(&self, trs: &Trs) -> Result<(), String> {
        let rule = trs.rules().get(self.rule).ok_or("witness names a missing rule")?;
        let Term::Var(v) = &rule.rhs else { return Err("witness rule does not project to a variable".into()) };
        if rule.lhs.occurrences(v) != 1 {
            return Err("projected variable occurs more than once in the witness lhs".into());
        }
        if self.guarded.occurrences(&self.variable) != 1 {
            return Err("projected variable does not occur exactly once in the guarded term".into());
        }
        let sub = rule.lhs.at(&self.position).ok_or("bad witness position")?;
        let renamed: Vec<&Term> = self.renaming.iter().map(|(_, t)| t).collect();
        if renamed.iter().any(|t| !t.is_var()) || renamed.iter().collect::<BTreeSet<_>>().len() != renamed.len() {
            return Err("witness renaming is not injective on variables".into());
        }
        if self.renaming.apply(sub) != self.guarded {
            return Err("renamed lhs subterm differs from the guarded term".into());
        }
        if self.renaming.apply(&rule.rhs) != Term::Var(self.variable.clone()) {
            return Err("renamed rhs is not the projected variable".into());
        }
        Ok(())
    }
}

/// Matches `pattern` onto `subject` by an injective variable renaming.
fn renaming_match(pattern: &Term, subject: &Term, fwd: &mut BTreeMap<Var, Var>, bwd: &mut BTreeMap<Var, Var>) -> bool {
    match (pattern, subject) {
        (Term::Var(x), Term::Var(y)) => {
            let a = fwd.entry(x.clone()).or_insert_with(|| y.clone()) == y;
            let b = bwd.entry(y.clone()).or_insert_with(|| x.clone()) == x;
            a && b
        }
        (Term::App(f, ps), Term::App(g, ss)) => {
            f == g && ps.len() == ss.len() && ps.iter().zip(ss).all(|(p, s)| renaming_match(p, s, fwd, bwd))
        }
        _ => false,
    }
}

/// First rule, in rule order, that projects `x` out of a superterm of `t`.
pub fn find_projecting_rule(trs: &Trs, t: &Term, x: &Var) -> Result<Option<ProjectingWitness>, ContractingError> {
    let count = t.occurrences(x);
    if count != 1 {
        return Err(ContractingError::NotSingleOccurrence { var: x.clone(), term: t.clone(), count });
    }
    Ok(projecting_rule(trs, t, x))
}

fn projecting_rule(trs: &Trs, t: &Term, x: &Var) -> Option<ProjectingWitness> {
    for (i, rule) in trs.rules().iter().enumerate() {
        let Term::Var(v) = &rule.rhs else { continue };
        if rule.lhs.occurrences(v) != 1 {
            continue;
        }
        for p in rule.lhs.positions() {
            let sub = rule.lhs.at(&p).expect("position from term");
            if !sub.contains_var(v) {
                continue;
            }
            let mut fwd = BTreeMap::new();
            let mut bwd = BTreeMap::new();
            if renaming_match(sub, t, &mut fwd, &mut bwd) && fwd.get(v) == Some(x) {
                return Some(ProjectingWitness {
                    rule: i,
                    position: p,
                    renaming: fwd.into_iter().map(|(a, b)| (a, Term::Var(b))).collect(),
                    guarded: t.clone(),
                    variable: x.clone(),
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepWitness {
    /// 0-based step index in the derivation.
    pub step: usize,
    pub witness: ProjectingWitness,
}

/// A projection-closed derivation `g →+ d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationCertificate {
    pub start: Term,
    pub steps: Vec<GembStep>,
    pub end: Term,
    pub witnesses: Vec<StepWitness>,
}

/// What a single step of a projection-closed derivation needs: `None` when
/// the step is not admissible at all, otherwise the (guarded term, variable)
/// pairs that must be covered by projecting rules.
fn step_obligations(cur: &Term, step: &GembStep, kept: &BTreeSet<Var>) -> Option<Vec<(Term, Var)>> {
    let Some(Term::App(_, args)) = cur.at(&step.position) else { return None };
    let i = step.index.checked_sub(1)?;
    let leafy = |ts: &[Term]| ts.iter().all(Term::is_leaf);
    let mut out = Vec::new();
    match step.rule {
        GembRule::HoistChild => return None,
        GembRule::Drop => {
            if !leafy(args) {
                return None;
            }
        }
        GembRule::Project => {
            if !leafy(args) {
                return None;
            }
            if let Term::Var(x) = &args[i] {
                if kept.contains(x) {
                    out.push((cur.at(&step.position)?.clone(), x.clone()));
                }
            }
        }
        GembRule::HoistParent => {
            let child = args.get(i)?;
            let others_leafy = args.iter().enumerate().all(|(k, a)| k == i || a.is_leaf());
            if !others_leafy || !leafy(child.args()) {
                return None;
            }
            for z in child.args() {
                if let Term::Var(x) = z {
                    if kept.contains(x) {
                        out.push((child.clone(), x.clone()));
                    }
                }
            }
        }
    }
    Some(out)
}

/// Searches for a projection-closed derivation from the linear term `g` to
/// `target` using schema rules 1, 2 and 4 with at least one step.
pub fn check_projection_closed_derivation(trs: &Trs, g: &Term, target: &Term) -> Option<DerivationCertificate> {
    if !g.is_linear() || !trs.signature().is_well_formed(target) || g == target {
        return None;
    }
    let kept = target.vars();
    let target_size = target.size();
    type Edge = (Term, GembStep, Vec<ProjectingWitness>);
    let mut parent: HashMap<Term, Option<Edge>> = HashMap::new();
    let mut memo: HashMap<(Term, Var), Option<ProjectingWitness>> = HashMap::new();
    let mut queue = VecDeque::from([g.clone()]);
    parent.insert(g.clone(), None);
    while let Some(s) = queue.pop_front() {
        if s == *target {
            let mut steps = Vec::new();
            let mut cur = s.clone();
            while let Some(Some((prev, step, ws))) = parent.get(&cur) {
                steps.push((step.clone(), ws.clone()));
                cur = prev.clone();
            }
            steps.reverse();
            let mut witnesses = Vec::new();
            for (k, (_, ws)) in steps.iter().enumerate() {
                witnesses.extend(ws.iter().map(|w| StepWitness { step: k, witness: w.clone() }));
            }
            return Some(DerivationCertificate {
                start: g.clone(),
                steps: steps.into_iter().map(|(s, _)| s).collect(),
                end: s,
                witnesses,
            });
        }
        if s.size() <= target_size || !kept.is_subset(&s.vars()) {
            continue;
        }
        'succ: for (v, step) in gemb_successors(&s) {
            if parent.contains_key(&v) {
                continue;
            }
            let Some(obligations) = step_obligations(&s, &step, &kept) else { continue };
            let mut ws = Vec::new();
            for (guard, x) in obligations {
                let w = memo
                    .entry((guard.clone(), x.clone()))
                    .or_insert_with(|| projecting_rule(trs, &guard, &x))
                    .clone();
                match w {
                    Some(w) => ws.push(w),
                    None => continue 'succ,
                }
            }
            parent.insert(v.clone(), Some((s.clone(), step, ws)));
            queue.push_back(v);
        }
    }
    None
}

impl DerivationCertificate {
    pub fn validate(&self, trs: &Trs) -> Result<(), String> {
        if !self.start.is_linear() {
            return Err("derivation start is not linear".into());
        }
        if self.steps.is_empty() {
            return Err("derivation is empty".into());
        }
        let kept = self.end.vars();
        let mut cur = self.start.clone();
        for (k, step) in self.steps.iter().enumerate() {
            let obligations = step_obligations(&cur, step, &kept).ok_or(format!("step {k} is not admissible"))?;
            let given: Vec<&ProjectingWitness> =
                self.witnesses.iter().filter(|w| w.step == k).map(|w| &w.witness).collect();
            for (guard, x) in obligations {
                let w = given
                    .iter()
                    .find(|w| w.guarded == guard && w.variable == x)
                    .ok_or(format!("step {k} lacks a projecting rule for {x}"))?;
                w.validate(trs)?;
            }
            cur = apply_gemb_step(&cur, step).ok_or(format!("step {k} does not apply"))?;
        }
        if cur != self.end {
            return Err("derivation does not end in the recorded term".into());
        }
        if !trs.signature().is_well_formed(&cur) {
            return Err("derivation ends in an ill-formed term".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermEqCertificate {
    pub permutation: PermWitness,
    pub witnesses: Vec<ProjectingWitness>,
}

fn perm_obligations(l: &Term, r: &Term) -> Vec<(Term, Var)> {
    let r_subs: Vec<Term> = r.strict_subterms().into_iter().collect();
    let mut out = Vec::new();
    for lp in l.strict_subterms() {
        if lp.is_var() {
            continue;
        }
        for x in lp.vars() {
            if r_subs.iter().any(|rp| *rp != lp && rp.contains_var(&x)) {
                out.push((lp.clone(), x));
            }
        }
    }
    out
}

/// Checks that `l = r` is a projection-closed permutative equality.
pub fn check_projection_closed_perm_eq(
    trs: &Trs,
    l: &Term,
    r: &Term,
    cross_kind: bool,
) -> Result<Option<PermEqCertificate>, ContractingError> {
    let Some(permutation) = perm_eq(l, r, cross_kind)? else {
        return Err(ContractingError::NotPermEqual { lhs: l.clone(), rhs: r.clone() });
    };
    let mut witnesses = Vec::new();
    for (lp, x) in perm_obligations(l, r) {
        if lp.occurrences(&x) != 1 {
            return Ok(None);
        }
        match projecting_rule(trs, &lp, &x) {
            Some(w) => witnesses.push(w),
            None => return Ok(None),
        }
    }
    Ok(Some(PermEqCertificate { permutation, witnesses }))
}

impl PermEqCertificate {
    pub fn validate(&self, trs: &Trs, l: &Term, r: &Term) -> Result<(), String> {
        if self.permutation.apply(l).as_ref() != Some(r) {
            return Err("permutation does not turn lhs into rhs".into());
        }
        for (lp, x) in perm_obligations(l, r) {
            let w = self
                .witnesses
                .iter()
                .find(|w| w.guarded == lp && w.variable == x)
                .ok_or(format!("missing projecting rule over {lp} for {x}"))?;
            w.validate(trs)?;
        }
        Ok(())
    }
}

/// `l|_p` with each variable occurrence replaced by a fresh variable, and
/// the substitution mapping the fresh variables back.
pub fn linearize(t: &Term, avoid: &BTreeSet<Var>) -> (Term, Substitution) {
    let mut back = Substitution::new();
    let mut k = 0;
    fn go(t: &Term, avoid: &BTreeSet<Var>, k: &mut usize, back: &mut Substitution) -> Term {
        match t {
            Term::Var(v) => loop {
                *k += 1;
                let fresh = Var::new(&format!("X{k}"));
                if avoid.contains(&fresh) {
                    continue;
                }
                back.insert(fresh.clone(), Term::Var(v.clone()));
                return Term::Var(fresh);
            },
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, avoid, k, back)).collect()),
        }
    }
    let g = go(t, avoid, &mut k, &mut back);
    (g, back)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RuleCertificate {
    Subterm { shape: SubtermShape },
    Derivation { position: Position, pattern: Term, back: Substitution, derivation: DerivationCertificate },
    PermutativeEquality { certificate: PermEqCertificate },
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractingReport {
    pub rules: Vec<RuleCertificate>,
    pub contracting: bool,
    /// 1-based index of the first uncertified rule.
    pub first_failure: Option<usize>,
}

fn derivation_branch(trs: &Trs, l: &Term, r: &Term) -> Option<RuleCertificate> {
    if r.depth() != 1 {
        return None;
    }
    let Term::App(h, r_args) = r else { return None };
    for p in l.positions() {
        let sub = l.at(&p).expect("position from term");
        if sub.is_leaf() {
            continue;
        }
        let (g, back) = linearize(sub, &l.vars());
        let g_vars = g.vars_ordered();
        let mut choices: Vec<Vec<Term>> = Vec::new();
        for ri in r_args {
            match ri {
                Term::Var(y) => choices.push(
                    g_vars.iter().filter(|x| back.apply(&Term::Var((*x).clone())) == Term::Var(y.clone())).map(|x| Term::Var(x.clone())).collect(),
                ),
                _ => choices.push(vec![ri.clone()]),
            }
        }
        for combo in itertools::Itertools::multi_cartesian_product(choices.into_iter().map(|c| c.into_iter())) {
            let vars: Vec<&Term> = combo.iter().filter(|t| t.is_var()).collect();
            if vars.iter().collect::<BTreeSet<_>>().len() != vars.len() {
                continue;
            }
            let d = Term::App(h.clone(), combo.clone());
            if back.apply(&d) != *r {
                continue;
            }
            if let Some(derivation) = check_projection_closed_derivation(trs, &g, &d) {
                return Some(RuleCertificate::Derivation { position: p, pattern: g, back, derivation });
            }
        }
        if r_args.is_empty() {
            // a constant rhs is already a subterm rule
            continue;
        }
    }
    None
}

/// Certifies each rule: subterm shape, then permutative equality of depth 2,
/// then a projection-closed derivation to a depth-1 rhs.
pub fn check_contracting(trs: &Trs) -> Result<ContractingReport, ContractingError> {
    let shapes = trs.subterm_shape();
    let mut rules = Vec::new();
    for (i, rule) in trs.rules().iter().enumerate() {
        let (l, r) = (&rule.lhs, &rule.rhs);
        if shapes.rules[i] != SubtermShape::Neither {
            rules.push(RuleCertificate::Subterm { shape: shapes.rules[i] });
            continue;
        }
        if l.depth() == 2 && r.depth() == 2 && perm_eq(l, r, false)?.is_some() {
            if let Some(certificate) = check_projection_closed_perm_eq(trs, l, r, false)? {
                rules.push(RuleCertificate::PermutativeEquality { certificate });
                continue;
            }
        }
        match derivation_branch(trs, l, r) {
            Some(c) => rules.push(c),
            None => rules.push(RuleCertificate::Uncertified),
        }
    }
    let first_failure = rules.iter().position(|c| matches!(c, RuleCertificate::Uncertified)).map(|i| i + 1);
    Ok(ContractingReport { contracting: first_failure.is_none(), rules, first_failure })
}

impl ContractingReport {
    /// Replays every certificate against the system.
    pub fn validate(&self, trs: &Trs) -> Result<(), String> {
        if self.rules.len() != trs.rules().len() {
            return Err("report does not cover every rule".into());
        }
        for (i, (c, rule)) in self.rules.iter().zip(trs.rules()).enumerate() {
            let (l, r) = (&rule.lhs, &rule.rhs);
            let res = match c {
                RuleCertificate::Subterm { .. } => {
                    if rule.is_subterm_rule() {
                        Ok(())
                    } else {
                        Err("not a subterm rule".to_string())
                    }
                }
                RuleCertificate::PermutativeEquality { certificate } => {
                    if l.depth() != 2 || r.depth() != 2 {
                        Err("permutative equality is not of depth 2".to_string())
                    } else {
                        certificate.validate(trs, l, r)
                    }
                }
                RuleCertificate::Derivation { position, pattern, back, derivation } => (|| {
                    let sub = l.at(position).ok_or("bad position")?;
                    if back.apply(pattern) != *sub || !pattern.is_linear() {
                        return Err("pattern does not linearize the lhs subterm".to_string());
                    }
                    if back.iter().any(|(_, t)| !t.is_var()) {
                        return Err("back substitution does not range over variables".to_string());
                    }
                    if derivation.start != *pattern {
                        return Err("derivation does not start at the pattern".to_string());
                    }
                    if back.apply(&derivation.end) != *r || r.depth() != 1 {
                        return Err("derivation end does not map to a depth-1 rhs".to_string());
                    }
                    derivation.validate(trs)
                })(),
                RuleCertificate::Uncertified => {
                    if self.contracting {
                        Err("uncertified rule in a contracting report".to_string())
                    } else {
                        Ok(())
                    }
                }
            };
            res.map_err(|e| format!("rule {}: {e}", i + 1))?;
        }
        Ok(())
    }
}

/// Contracting, and every rule strictly decreases depth.
pub fn check_strictly_contracting(trs: &Trs) -> Result<bool, ContractingError> {
    if !trs.rules().iter().all(|r| r.lhs.depth() > r.rhs.depth()) {
        return Ok(false);
    }
    Ok(check_contracting(trs)?.contracting)
}
