//! Frames, graph-embedded subterms, frame saturation, deduction, static
//! equivalence and the cap problem.

mod deduction;
mod gst;
mod saturation;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

pub use deduction::{
    cap_solve, deduce, deduce_empty, static_equivalent, CapSolution, Equation, EquationOrigin, KnowledgeOptions,
    StaticEquivalence,
};
pub use gst::{gst, gst_frame, DEFAULT_GST_CAP};
pub use saturation::{saturate, Provenance, SatEntry, SaturationState};

use crate::gemb::GembError;
use crate::rewriting::{NormalizeError, Trs};
use crate::signature::{Signature, SignatureError};
use crate::term::{Substitution, Symbol, Term, Var};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("frame binding {var} is not ground")]
    NonGroundBinding { var: Var },
    #[error("frame variable {0} is bound twice")]
    DuplicateVariable(Var),
    #[error("frame variable {0} clashes with a signature symbol")]
    VariableClash(Var),
    #[error("term {0} is not ground")]
    NonGround(Term),
    #[error("gst exceeded the cap of {cap} terms")]
    GstOverflow { cap: usize },
    #[error("frames have different domains")]
    DomainMismatch,
    #[error("equation candidates exceeded the cap of {cap}")]
    CandidateOverflow { cap: usize },
    #[error("symbol {0} is private, so the intruder repertoire is incomplete")]
    IncompleteRepertoire(Symbol),
    #[error("no term in the set contains the secret {0}")]
    SecretAbsent(Symbol),
    #[error("secret {0} occurs in the rewrite system")]
    SecretInTheory(Symbol),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Gemb(#[from] GembError),
}

/// `ν ñ.σ`: restricted names and ground bindings, kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frame {
    pub restricted: BTreeSet<Symbol>,
    bindings: Vec<(Var, Term)>,
}

impl Frame {
    pub fn new<I, J>(restricted: I, bindings: J) -> Result<Self, KnowledgeError>
    where
        I: IntoIterator<Item = Symbol>,
        J: IntoIterator<Item = (Var, Term)>,
    {
        let mut out: Vec<(Var, Term)> = Vec::new();
        for (x, t) in bindings {
            if !t.is_ground() {
                return Err(KnowledgeError::NonGroundBinding { var: x });
            }
            if out.iter().any(|(y, _)| *y == x) {
                return Err(KnowledgeError::DuplicateVariable(x));
            }
            out.push((x, t));
        }
        Ok(Frame { restricted: restricted.into_iter().collect(), bindings: out })
    }

    /// Convenience constructor from names and `(var, term)` source strings.
    pub fn parse(restricted: &[&str], bindings: &[(&str, &str)]) -> Result<Self, String> {
        let mut bs = Vec::new();
        for (x, t) in bindings {
            bs.push((Var::new(x), crate::syntax::parse_term(t).map_err(|e| e.to_string())?));
        }
        Frame::new(restricted.iter().map(|n| Symbol::new(n)), bs).map_err(|e| e.to_string())
    }

    pub fn bindings(&self) -> &[(Var, Term)] {
        &self.bindings
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.bindings.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.bindings.iter().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn substitution(&self) -> Substitution {
        self.bindings.iter().cloned().collect()
    }

    /// Constants of `Ran(σ)` that are not restricted.
    pub fn free_names(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (_, t) in &self.bindings {
            out.extend(t.constants());
        }
        out.retain(|c| !self.restricted.contains(c));
        out
    }

    pub fn is_restricted(&self, c: &Symbol) -> bool {
        self.restricted.contains(c)
    }

    /// Applies a recipe: frame variables are replaced by their bindings.
    pub fn apply(&self, recipe: &Term) -> Term {
        self.substitution().apply(recipe)
    }

    /// Checks frame variables against `sig`.
    pub fn check_against(&self, sig: &Signature) -> Result<(), KnowledgeError> {
        for (x, _) in &self.bindings {
            if sig.contains(&Symbol::new(x.as_str())) {
                return Err(KnowledgeError::VariableClash(x.clone()));
            }
        }
        Ok(())
    }

    /// The system's signature extended with the frame's constants; restricted
    /// names become private.
    pub fn signature_with(&self, trs: &Trs) -> Result<Signature, KnowledgeError> {
        let mut sig = trs.signature().clone();
        for (_, t) in &self.bindings {
            sig.absorb(t)?;
        }
        for n in &self.restricted {
            let arity = sig.arity(n).unwrap_or(0);
            sig.declare(n.as_str(), arity, false)?;
        }
        Ok(sig)
    }

    /// Renames restricted names that also occur in `avoid`.
    pub fn rename_restricted_apart(&self, avoid: &BTreeSet<Symbol>) -> Frame {
        let mut taken: BTreeSet<Symbol> = avoid.clone();
        for (_, t) in &self.bindings {
            taken.extend(t.constants());
        }
        taken.extend(self.restricted.iter().cloned());
        let mut map = std::collections::BTreeMap::new();
        for n in &self.restricted {
            if avoid.contains(n) {
                let mut k = 1;
                let fresh = loop {
                    let c = Symbol::new(&format!("{}{}", n.as_str(), "'".repeat(k)));
                    if !taken.contains(&c) {
                        break c;
                    }
                    k += 1;
                };
                taken.insert(fresh.clone());
                map.insert(n.clone(), fresh);
            }
        }
        if map.is_empty() {
            return self.clone();
        }
        fn go(t: &Term, map: &std::collections::BTreeMap<Symbol, Symbol>) -> Term {
            match t {
                Term::App(f, args) if args.is_empty() => Term::App(map.get(f).unwrap_or(f).clone(), vec![]),
                Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, map)).collect()),
                Term::Var(_) => t.clone(),
            }
        }
        Frame {
            restricted: self.restricted.iter().map(|n| map.get(n).unwrap_or(n).clone()).collect(),
            bindings: self.bindings.iter().map(|(x, t)| (x.clone(), go(t, &map))).collect(),
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.restricted.iter().map(|n| n.to_string()).collect();
        let binds: Vec<String> = self.bindings.iter().map(|(x, t)| format!("{x} ↦ {t}")).collect();
        write!(f, "ν{{{}}}.{{{}}}", names.join(","), binds.join(", "))
    }
}

/// Parses a recipe; names that are frame variables become variables.
pub fn parse_recipe(src: &str, frame: &Frame) -> Result<Term, crate::syntax::ParseError> {
    let t = crate::syntax::parse_term(src)?;
    fn go(t: &Term, dom: &BTreeSet<Var>) -> Term {
        match t {
            Term::App(f, args) if args.is_empty() && dom.contains(&Var::new(f.as_str())) => Term::Var(Var::new(f.as_str())),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| go(a, dom)).collect()),
            Term::Var(_) => t.clone(),
        }
    }
    Ok(go(&t, &frame.domain()))
}

/// Normalizes every binding.
pub fn normalize_frame(frame: &Frame, trs: &Trs, budget: usize) -> Result<Frame, KnowledgeError> {
    let mut bindings = Vec::new();
    for (x, t) in &frame.bindings {
        bindings.push((x.clone(), trs.normalize(t, budget)?.0));
    }
    Ok(Frame { restricted: frame.restricted.clone(), bindings })
}

/// A recipe may only use names outside `ñ`.
pub fn recipe_is_admissible(frame: &Frame, recipe: &Term) -> bool {
    recipe.constants().iter().all(|c| !frame.is_restricted(c))
}
