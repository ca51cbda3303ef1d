//! Applicability of the constructor-sharing union results.

use std::collections::BTreeSet;

use serde::Serialize;

use super::permutative::{check_permutative, EqPresentation};
use crate::contracting::{check_contracting, check_strictly_contracting, ContractingError};
use crate::rewriting::{check_convergent, ConvergenceBudgets, Trs};
use crate::signature::{Signature, SignatureError};
use crate::term::Symbol;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum CombinationError {
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Contracting(#[from] ContractingError),
    #[error("supply exactly one of a second system or an axiom set")]
    BadArguments,
    #[error("union is not a valid system: {0}")]
    Union(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedSymbol {
    pub symbol: Symbol,
    pub constructor_in_first: bool,
    /// Constructor of the second system, or for axioms: absent from every axiom root.
    pub constructor_in_second: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Premise {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CombinationReport {
    /// `rewrite` for two systems, `axioms` for a system plus a presentation.
    pub kind: &'static str,
    pub shared: Vec<SharedSymbol>,
    pub premises: Vec<Premise>,
    pub conclusions: Vec<String>,
    pub applicable: bool,
}

fn premise(out: &mut Vec<Premise>, name: &str, holds: bool) -> bool {
    out.push(Premise { name: name.into(), holds });
    holds
}

fn symbols_of(trs: &Trs) -> BTreeSet<Symbol> {
    trs.rules().iter().flat_map(|r| r.lhs.symbols().into_iter().chain(r.rhs.symbols())).collect()
}

fn presentation_signature(e: &EqPresentation) -> Result<Signature, SignatureError> {
    let mut sig = Signature::new();
    for (l, r) in &e.axioms {
        sig.absorb(l)?;
        sig.absorb(r)?;
    }
    Ok(sig)
}

pub fn combination_check(
    r1: &Trs,
    r2: Option<&Trs>,
    e: Option<&EqPresentation>,
    budgets: &ConvergenceBudgets,
) -> Result<CombinationReport, CombinationError> {
    match (r2, e) {
        (Some(r2), None) => two_systems(r1, r2, budgets),
        (None, Some(e)) => with_axioms(r1, e, budgets),
        _ => Err(CombinationError::BadArguments),
    }
}

fn two_systems(r1: &Trs, r2: &Trs, budgets: &ConvergenceBudgets) -> Result<CombinationReport, CombinationError> {
    let sig = r1.signature().merge(r2.signature())?;
    let shared: Vec<SharedSymbol> = symbols_of(r1)
        .intersection(&symbols_of(r2))
        .map(|f| SharedSymbol {
            symbol: f.clone(),
            constructor_in_first: r1.is_constructor(f),
            constructor_in_second: r2.is_constructor(f),
        })
        .collect();
    let mut premises = Vec::new();
    let sharing = premise(
        &mut premises,
        "shared symbols are constructors of both",
        shared.iter().all(|s| s.constructor_in_first && s.constructor_in_second),
    );
    let conv1 = premise(&mut premises, "first convergent", check_convergent(r1, budgets).is_yes());
    let conv2 = premise(&mut premises, "second convergent", check_convergent(r2, budgets).is_yes());
    let strict1 = premise(&mut premises, "first strictly contracting", check_strictly_contracting(r1)?);
    let strict2 = premise(&mut premises, "second strictly contracting", check_strictly_contracting(r2)?);
    let con1 = premise(&mut premises, "first contracting", check_contracting(r1)?.contracting);
    let con2 = premise(&mut premises, "second contracting", check_contracting(r2)?.contracting);
    let mut conclusions = Vec::new();
    if sharing && conv1 && conv2 && strict1 && strict2 {
        let union = r1.union(r2).map_err(|e| CombinationError::Union(e.to_string()))?;
        let union = union.with_signature(sig.clone()).map_err(|e| CombinationError::Union(e.to_string()))?;
        let strict = premise(&mut premises, "union strictly contracting (checked)", check_strictly_contracting(&union)?);
        let conv = premise(&mut premises, "union convergent (checked)", check_convergent(&union, budgets).is_yes());
        if strict && conv {
            conclusions.push("union is strictly contracting convergent".to_string());
        }
    }
    if sharing && conv1 && conv2 && con1 && con2 {
        conclusions.push("deduction and static equivalence decidable in the union".to_string());
    }
    let applicable = !conclusions.is_empty();
    Ok(CombinationReport { kind: "rewrite", shared, premises, conclusions, applicable })
}

fn with_axioms(r: &Trs, e: &EqPresentation, budgets: &ConvergenceBudgets) -> Result<CombinationReport, CombinationError> {
    r.signature().merge(&presentation_signature(e)?)?;
    let roots = e.root_symbols();
    let shared: Vec<SharedSymbol> = symbols_of(r)
        .intersection(&e.symbols())
        .map(|f| SharedSymbol {
            symbol: f.clone(),
            constructor_in_first: r.is_constructor(f),
            constructor_in_second: !roots.contains(f),
        })
        .collect();
    let mut premises = Vec::new();
    let sharing = premise(
        &mut premises,
        "shared symbols are constructors of the system and no axiom root",
        shared.iter().all(|s| s.constructor_in_first && s.constructor_in_second),
    );
    let perm = premise(&mut premises, "axioms permutative", check_permutative(e));
    let conv = premise(&mut premises, "system convergent", check_convergent(r, budgets).is_yes());
    let con = premise(&mut premises, "system contracting", check_contracting(r)?.contracting);
    let mut conclusions = Vec::new();
    if sharing && perm && conv && con {
        conclusions.push("deduction decidable in the union with the axioms".to_string());
    }
    let applicable = !conclusions.is_empty();
    Ok(CombinationReport { kind: "axioms", shared, premises, conclusions, applicable })
}
