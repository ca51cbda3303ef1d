use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::saturation::{fresh_name, saturate, SaturationState};
use super::{normalize_frame, recipe_is_admissible, Frame, KnowledgeError, DEFAULT_GST_CAP};
use crate::rewriting::{Trs, DEFAULT_NORMALIZE_BUDGET};
use crate::signature::Signature;
use crate::term::{Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnowledgeOptions {
    pub normalize_budget: usize,
    pub gst_cap: usize,
    /// Context bound for equation candidates; `None` means `c_R²`.
    pub context_bound: Option<usize>,
    /// Maximum number of small-context instances examined per frame.
    pub candidate_cap: usize,
    /// The designated fresh public name; picked automatically when `None`.
    pub fresh_name: Option<String>,
}

impl Default for KnowledgeOptions {
    fn default() -> Self {
        KnowledgeOptions {
            normalize_budget: DEFAULT_NORMALIZE_BUDGET,
            gst_cap: DEFAULT_GST_CAP,
            context_bound: None,
            candidate_cap: 200_000,
            fresh_name: None,
        }
    }
}

/// Builds `t` from saturation entries, public names and public symbols.
pub fn deduce_empty(state: &SaturationState, frame: &Frame, t: &Term) -> Option<Term> {
    if let Some(r) = state.recipe(t) {
        return Some(r.clone());
    }
    match t {
        Term::App(f, args) => {
            if frame.is_restricted(f) || !state.is_public(f) {
                return None;
            }
            let rs: Option<Vec<Term>> = args.iter().map(|a| deduce_empty(state, frame, a)).collect();
            Some(Term::App(f.clone(), rs?))
        }
        Term::Var(_) => None,
    }
}

/// A recipe `ζ` with `ζσ↓ = t↓`, if one exists.
pub fn deduce(frame: &Frame, trs: &Trs, t: &Term, opts: &KnowledgeOptions) -> Result<Option<Term>, KnowledgeError> {
    if !t.is_ground() {
        return Err(KnowledgeError::NonGround(t.clone()));
    }
    let frame = normalize_frame(frame, trs, opts.normalize_budget)?;
    let state = saturate(&frame, trs, opts)?;
    let target = trs.normalize(t, opts.normalize_budget)?.0;
    let mut state = state;
    // target symbols unknown to the theory or frame are public
    state.sig.absorb(&target)?;
    Ok(deduce_empty(&state, &frame, &target))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationOrigin {
    /// Two recipes for one entry, one of them found by a root rewrite.
    Rewrite,
    /// A small context whose root rewrite result is rebuilt from entries.
    Closure,
    /// A recipe composed from entries against the kept recipe.
    Composition,
    /// Two frame variables or names with the same value.
    Shared,
}

/// `lhs = rhs`, an equality between recipes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Equation {
    pub origin: EquationOrigin,
    pub lhs: Term,
    pub rhs: Term,
}

impl std::fmt::Display for Equation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl Equation {
    /// Whether the equation holds in `frame`.
    pub fn holds_in(&self, frame: &Frame, trs: &Trs, budget: usize) -> Result<bool, KnowledgeError> {
        if !recipe_is_admissible(frame, &self.lhs) || !recipe_is_admissible(frame, &self.rhs) {
            return Ok(false);
        }
        let a = trs.normalize(&frame.apply(&self.lhs), budget)?.0;
        let b = trs.normalize(&frame.apply(&self.rhs), budget)?.0;
        Ok(a == b)
    }
}

/// Candidate equations of one frame: alternative recipes for entries, and
/// small-context root rewrites rebuilt from entries.
pub(crate) fn equations(
    state: &SaturationState,
    frame: &Frame,
    trs: &Trs,
    opts: &KnowledgeOptions,
) -> Result<Vec<Equation>, KnowledgeError> {
    let mut out = BTreeSet::new();
    for a in &state.alternatives {
        let e = &state.entries[a.entry];
        let origin = match (&e.provenance, a.by_rewrite) {
            (_, true) => EquationOrigin::Rewrite,
            (super::Provenance::Rewrite { .. }, false) => EquationOrigin::Rewrite,
            (_, false) if a.recipe.is_leaf() && e.recipe.is_leaf() => EquationOrigin::Shared,
            _ => EquationOrigin::Composition,
        };
        out.insert(Equation { origin, lhs: a.recipe.clone(), rhs: e.recipe.clone() });
    }
    let bound = state.c_r;
    let mut seen = 0usize;
    for rule in trs.rules() {
        let mut sols = Vec::new();
        state.instances(&rule.lhs, &BTreeMap::new(), bound, &mut sols);
        seen += sols.len();
        if seen > opts.candidate_cap {
            return Err(KnowledgeError::CandidateOverflow { cap: opts.candidate_cap });
        }
        for s in sols {
            let subst: crate::term::Substitution = s.binds.iter().map(|(x, t)| (x.clone(), t.clone())).collect();
            let result = trs.normalize(&subst.apply(&rule.rhs), opts.normalize_budget)?.0;
            let Some(rhs) = deduce_empty(state, frame, &result) else { continue };
            if rhs.size() > context_bound(state, opts) + rhs_holes(state, &rhs) {
                continue;
            }
            // equations that hold by the rewrite rules alone carry no information
            let l = trs.normalize(&s.recipe, opts.normalize_budget)?.0;
            let r = trs.normalize(&rhs, opts.normalize_budget)?.0;
            if l == r {
                continue;
            }
            out.insert(Equation { origin: EquationOrigin::Closure, lhs: s.recipe, rhs });
        }
    }
    let mut v: Vec<Equation> = out.into_iter().collect();
    v.sort_by(|a, b| {
        (a.origin, a.lhs.size() + a.rhs.size(), &a.lhs, &a.rhs).cmp(&(b.origin, b.lhs.size() + b.rhs.size(), &b.lhs, &b.rhs))
    });
    Ok(v)
}

fn context_bound(state: &SaturationState, opts: &KnowledgeOptions) -> usize {
    opts.context_bound.unwrap_or(state.c_r * state.c_r)
}

/// Size of the recipe parts contributed by entries, minus one per entry, so
/// that the remaining size is that of the context.
fn rhs_holes(state: &SaturationState, recipe: &Term) -> usize {
    let mut extra = 0;
    let mut stack = vec![recipe];
    while let Some(t) = stack.pop() {
        if state.entries.iter().any(|e| &e.recipe == t) {
            extra += t.size() - 1;
        } else {
            stack.extend(t.args());
        }
    }
    extra
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StaticEquivalence {
    Equivalent { equations_checked: usize },
    /// `witness` holds in frame `holds_in` (1 or 2) and fails in the other.
    NotEquivalent { witness: Equation, holds_in: u8 },
}

/// Checks each frame's candidate equations in the other frame.
pub fn static_equivalent(
    phi: &Frame,
    psi: &Frame,
    trs: &Trs,
    opts: &KnowledgeOptions,
) -> Result<StaticEquivalence, KnowledgeError> {
    if phi.domain() != psi.domain() {
        return Err(KnowledgeError::DomainMismatch);
    }
    let phi = normalize_frame(phi, trs, opts.normalize_budget)?.rename_restricted_apart(&psi.free_names());
    let psi = normalize_frame(psi, trs, opts.normalize_budget)?.rename_restricted_apart(&phi.free_names());
    let mut sig: Signature = phi.signature_with(trs)?;
    for (_, t) in psi.bindings() {
        sig.absorb(t)?;
    }
    for n in &psi.restricted {
        sig.declare(n.as_str(), 0, false)?;
    }
    let mut opts = opts.clone();
    if opts.fresh_name.is_none() {
        opts.fresh_name = Some(fresh_name(&sig, "fresh").as_str().to_string());
    }
    let mut checked = 0;
    for (idx, (a, b)) in [(&phi, &psi), (&psi, &phi)].into_iter().enumerate() {
        let state = saturate(a, trs, &opts)?;
        for eq in equations(&state, a, trs, &opts)? {
            checked += 1;
            if !eq.holds_in(b, trs, opts.normalize_budget)? {
                return Ok(StaticEquivalence::NotEquivalent { witness: eq, holds_in: idx as u8 + 1 });
            }
        }
    }
    Ok(StaticEquivalence::Equivalent { equations_checked: checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapSolution {
    /// A linear term over public symbols.
    pub cap: Term,
    /// Which input term each cap variable stands for.
    pub assignment: Vec<(Var, Term)>,
}

impl CapSolution {
    pub fn instantiate(&self) -> Term {
        let s: crate::term::Substitution = self.assignment.iter().cloned().collect();
        s.apply(&self.cap)
    }
}

/// Solves the cap problem for a complete intruder repertoire through
/// deduction from `ν{m}.{x1 ↦ s1, ...}`.
pub fn cap_solve(
    trs: &Trs,
    terms: &[Term],
    secret: &Symbol,
    extra_private: &BTreeSet<Symbol>,
    opts: &KnowledgeOptions,
) -> Result<Option<CapSolution>, KnowledgeError> {
    if trs.signature().contains(secret) {
        return Err(KnowledgeError::SecretInTheory(secret.clone()));
    }
    if let Some(p) = trs.signature().iter().find(|(f, i)| !i.public && *f != secret).map(|(f, _)| f) {
        return Err(KnowledgeError::IncompleteRepertoire(p.clone()));
    }
    if let Some(p) = extra_private.iter().find(|f| *f != secret) {
        return Err(KnowledgeError::IncompleteRepertoire(p.clone()));
    }
    for t in terms {
        if !t.is_ground() {
            return Err(KnowledgeError::NonGround(t.clone()));
        }
    }
    if !terms.iter().any(|t| t.constants().contains(secret)) {
        return Err(KnowledgeError::SecretAbsent(secret.clone()));
    }
    let frame = Frame::new(
        [secret.clone()],
        terms.iter().enumerate().map(|(i, t)| (Var::new(&format!("x{}", i + 1)), t.clone())),
    )?;
    let Some(recipe) = deduce(&frame, trs, &Term::App(secret.clone(), vec![]), opts)? else { return Ok(None) };
    let mut assignment = Vec::new();
    fn linearize(t: &Term, frame: &Frame, out: &mut Vec<(Var, Term)>) -> Term {
        match t {
            Term::Var(x) => {
                let y = Var::new(&format!("x{}", out.len() + 1));
                out.push((y.clone(), frame.get(x).expect("recipe variables are frame variables").clone()));
                Term::Var(y)
            }
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| linearize(a, frame, out)).collect()),
        }
    }
    let cap = linearize(&recipe, &frame, &mut assignment);
    Ok(Some(CapSolution { cap, assignment }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn dec() -> Trs {
        Trs::parse_rules(&["dec(enc(X,Y),Y) -> X"]).unwrap()
    }

    #[test]
    fn deduction_examples() {
        let o = KnowledgeOptions::default();
        let p = Frame::parse(&["n"], &[("v", "enc(a,n)"), ("w", "n")]).unwrap();
        // a is a free name, so the cheapest recipe is a itself
        assert_eq!(deduce(&p, &dec(), &t("a"), &o).unwrap(), Some(t("a")));
        let hidden = Frame::parse(&["n", "a"], &[("v", "enc(a,n)"), ("w", "n")]).unwrap();
        assert_eq!(deduce(&hidden, &dec(), &t("a"), &o).unwrap(), Some(super::super::parse_recipe("dec(v,w)", &hidden).unwrap()));
        let f = Frame::parse(&["n"], &[("v", "enc(a,n)")]).unwrap();
        assert_eq!(deduce(&f, &dec(), &t("n"), &o).unwrap(), None);
        assert_eq!(deduce(&f, &dec(), &t("c"), &o).unwrap(), Some(t("c")));
        assert_eq!(deduce(&f, &dec(), &t("pair(a,enc(a,n))"), &o).unwrap(), Some(super::super::parse_recipe("pair(a,v)", &f).unwrap()));
        assert!(deduce(&f, &dec(), &t("X"), &o).is_err());
    }

    #[test]
    fn static_equivalence_examples() {
        let o = KnowledgeOptions::default();
        let phi = Frame::parse(&["n"], &[("v", "enc(a,n)")]).unwrap();
        let psi = Frame::parse(&["n"], &[("v", "enc(b,n)")]).unwrap();
        assert!(matches!(static_equivalent(&phi, &psi, &dec(), &o).unwrap(), StaticEquivalence::Equivalent { .. }));
        assert!(matches!(static_equivalent(&phi, &phi, &dec(), &o).unwrap(), StaticEquivalence::Equivalent { .. }));
        let phi2 = Frame::parse(&["n"], &[("v", "enc(a,n)"), ("w", "n")]).unwrap();
        let psi2 = Frame::parse(&["n"], &[("v", "enc(b,n)"), ("w", "n")]).unwrap();
        match static_equivalent(&phi2, &psi2, &dec(), &o).unwrap() {
            StaticEquivalence::NotEquivalent { witness, holds_in } => {
                assert_eq!(witness.to_string(), "dec(v,w) = a");
                assert_eq!(holds_in, 1);
            }
            v => panic!("{v:?}"),
        }
        assert!(matches!(static_equivalent(&phi, &phi2, &dec(), &o), Err(KnowledgeError::DomainMismatch)));
    }

    #[test]
    fn cap_examples() {
        let o = KnowledgeOptions::default();
        let m = Symbol::new("m");
        let none = BTreeSet::new();
        let s = cap_solve(&dec(), &[t("enc(m,k)"), t("k")], &m, &none, &o).unwrap().unwrap();
        assert_eq!(s.cap, Term::app("dec", vec![Term::var("x1"), Term::var("x2")]));
        assert_eq!(dec().normal_form(&s.instantiate()).unwrap(), t("m"));
        // with a complete repertoire the key constant is public
        let s = cap_solve(&dec(), &[t("enc(m,k)")], &m, &none, &o).unwrap().unwrap();
        assert_eq!(s.instantiate(), t("dec(enc(m,k),k)"));
        let s = cap_solve(&dec(), &[t("m")], &m, &none, &o).unwrap().unwrap();
        assert_eq!(s.cap, Term::var("x1"));
        let private_k: BTreeSet<Symbol> = [Symbol::new("k")].into_iter().collect();
        assert!(matches!(
            cap_solve(&dec(), &[t("enc(m,k)")], &m, &private_k, &o),
            Err(KnowledgeError::IncompleteRepertoire(_))
        ));
        assert!(cap_solve(&dec(), &[t("enc(a,k)")], &m, &none, &o).is_err());
    }
}
