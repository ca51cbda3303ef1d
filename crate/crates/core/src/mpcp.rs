//! Reduction from the modified Post correspondence problem to deduction in a
//! graph-embedded convergent system.

use serde::Serialize;

use crate::knowledge::Frame;
use crate::rewriting::{Rule, Trs};
use crate::signature::Signature;
use crate::term::{Symbol, Term, Var};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum MpcpError {
    #[error("no pairs given")]
    NoPairs,
    #[error("pair {0} has an empty string")]
    EmptyString(usize),
    #[error("letter {0:?} is not in {{a,b}}")]
    BadLetter(char),
    #[error("malformed pair list: {0}")]
    Syntax(String),
    #[error("index {0} is out of range")]
    BadIndex(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MpcpInstance {
    pub pairs: Vec<(String, String)>,
    pub alpha0: String,
    pub beta0: String,
}

fn check_letters(s: &str) -> Result<(), MpcpError> {
    match s.chars().find(|c| *c != 'a' && *c != 'b') {
        Some(c) => Err(MpcpError::BadLetter(c)),
        None => Ok(()),
    }
}

impl MpcpInstance {
    pub fn new(pairs: Vec<(String, String)>, alpha0: &str, beta0: &str) -> Result<Self, MpcpError> {
        if pairs.is_empty() {
            return Err(MpcpError::NoPairs);
        }
        for (i, (a, b)) in pairs.iter().enumerate() {
            if a.is_empty() || b.is_empty() {
                return Err(MpcpError::EmptyString(i + 1));
            }
            check_letters(a)?;
            check_letters(b)?;
        }
        check_letters(alpha0)?;
        check_letters(beta0)?;
        Ok(MpcpInstance { pairs, alpha0: alpha0.into(), beta0: beta0.into() })
    }

    /// `ba:baa,ab:ba,aaa:aa`.
    pub fn parse(pairs: &str, alpha0: &str, beta0: &str) -> Result<Self, MpcpError> {
        let mut out = Vec::new();
        for p in pairs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = p.split_once(':').ok_or_else(|| MpcpError::Syntax(p.into()))?;
            out.push((a.trim().to_string(), b.trim().to_string()));
        }
        MpcpInstance::new(out, alpha0, beta0)
    }

    /// Whether `indices` (1-based) is a solution.
    pub fn is_solution(&self, indices: &[usize]) -> Result<bool, MpcpError> {
        let (a, b) = self.concat(indices)?;
        Ok(!indices.is_empty() && a == b && a.ends_with(&self.alpha0) && b.ends_with(&self.beta0))
    }

    fn concat(&self, indices: &[usize]) -> Result<(String, String), MpcpError> {
        let mut a = String::new();
        let mut b = String::new();
        for &i in indices {
            let (x, y) = self.pairs.get(i.wrapping_sub(1)).ok_or(MpcpError::BadIndex(i))?;
            a.push_str(x);
            b.push_str(y);
        }
        Ok((a, b))
    }
}

/// Compiles a string outside-in: `ba` over `t` is `b(a(t))`.
pub fn tower(s: &str, inner: Term) -> Term {
    s.chars().rev().fold(inner, |acc, c| Term::app(&c.to_string(), vec![acc]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MpcpReduction {
    pub trs: Trs,
    pub frame: Frame,
    pub target: Term,
}

fn v(name: &str) -> Term {
    Term::var(name)
}

/// Block rules in pair order, then the unlock rule. The lock argument of a
/// block rule gets its own variable `W`.
pub fn generate_reduction(inst: &MpcpInstance) -> Result<MpcpReduction, MpcpError> {
    if inst.pairs.is_empty() {
        return Err(MpcpError::NoPairs);
    }
    let mut rules = Vec::new();
    for (i, (a, b)) in inst.pairs.iter().enumerate() {
        let g = format!("g{}", i + 1);
        let lhs = Term::app(
            "f",
            vec![tower(a, v("X")), Term::app(&g, vec![v("Y")]), tower(b, v("Z")), Term::app("unlocked", vec![v("W")])],
        );
        let rhs = Term::app("f", vec![v("X"), v("Y"), v("Z"), Term::app("unlocked", vec![v("W")])]);
        rules.push(Rule::new(lhs, rhs).expect("block rule is valid"));
    }
    let unlock_l = Term::app(
        "f",
        vec![v("X"), v("Y"), v("X"), Term::app("locked", vec![Term::app("unlocked", vec![v("Z")])])],
    );
    let unlock_r = Term::app("f", vec![v("X"), v("Y"), v("X"), Term::app("unlocked", vec![v("Z")])]);
    rules.push(Rule::new(unlock_l, unlock_r).expect("unlock rule is valid"));

    let mut sig = Signature::new();
    for (name, arity) in [("f", 4), ("a", 1), ("b", 1), ("locked", 1), ("unlocked", 1), ("c", 0), ("d", 0), ("e", 0)] {
        sig.declare(name, arity, true).expect("fresh signature");
    }
    for i in 1..=inst.pairs.len() {
        sig.declare(&format!("g{i}"), 1, true).expect("fresh signature");
    }
    let trs = Trs::new(sig, rules).expect("rules are well formed");
    let frame = Frame::new(
        [Symbol::new("c"), Symbol::new("e")],
        [
            (Var::new("x"), tower(&inst.alpha0, Term::constant("c"))),
            (Var::new("y"), tower(&inst.beta0, Term::constant("c"))),
            (
                Var::new("z"),
                Term::app("locked", vec![Term::app("unlocked", vec![Term::constant("e")])]),
            ),
        ],
    )
    .expect("ground bindings");
    let target = Term::app(
        "f",
        vec![Term::constant("c"), Term::constant("d"), Term::constant("c"), Term::app("unlocked", vec![Term::constant("e")])],
    );
    Ok(MpcpReduction { trs, frame, target })
}

/// `f(α'(x), g_i1(...g_ik(d)), β'(y), z)` for a solution `i1..ik`, or `None`
/// when `indices` is not a solution.
pub fn solution_recipe(inst: &MpcpInstance, indices: &[usize]) -> Result<Option<Term>, MpcpError> {
    if !inst.is_solution(indices)? {
        return Ok(None);
    }
    let (a, b) = inst.concat(indices)?;
    let a1 = &a[..a.len() - inst.alpha0.len()];
    let b1 = &b[..b.len() - inst.beta0.len()];
    let gs = indices.iter().rev().fold(Term::constant("d"), |acc, i| Term::app(&format!("g{i}"), vec![acc]));
    Ok(Some(Term::app("f", vec![tower(a1, v("x")), gs, tower(b1, v("y")), v("z")])))
}

/// Shortest solution of length at most `max_len`, ties broken
/// lexicographically on indices.
pub fn solve_bounded(inst: &MpcpInstance, max_len: usize) -> Option<Vec<usize>> {
    let n = inst.pairs.len();
    for len in 1..=max_len {
        let mut idx = vec![1; len];
        loop {
            if inst.is_solution(&idx).unwrap_or(false) {
                return Some(idx);
            }
            let mut k = len;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                if idx[k] < n {
                    idx[k] += 1;
                    break;
                }
                idx[k] = 1;
            }
            if idx.iter().all(|&i| i == 1) {
                break;
            }
        }
    }
    None
}
