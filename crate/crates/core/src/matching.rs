//! Syntactic matching, unification and homeomorphic embedding.

use std::collections::BTreeMap;

use crate::term::{Substitution, Term, Var};

/// Finds σ with `pattern·σ = subject`. Variables of the subject are treated
/// as rigid.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut binds = BTreeMap::new();
    if match_into(pattern, subject, &mut binds) {
        Some(binds.into_iter().collect())
    } else {
        None
    }
}

/// Extends `binds` so that `pattern` matches `subject`; on failure `binds`
/// may hold partial bindings and should be discarded.
pub fn match_into(pattern: &Term, subject: &Term, binds: &mut BTreeMap<Var, Term>) -> bool {
    match pattern {
        Term::Var(x) => match binds.get(x) {
            Some(t) => t == subject,
            None => {
                binds.insert(x.clone(), subject.clone());
                true
            }
        },
        Term::App(f, ps) => match subject {
            Term::App(g, ss) if f == g && ps.len() == ss.len() => {
                ps.iter().zip(ss).all(|(p, s)| match_into(p, s, binds))
            }
            _ => false,
        },
    }
}

/// Like [`match_into`] but leaves `binds` untouched on failure.
pub fn match_extend(pattern: &Term, subject: &Term, binds: &BTreeMap<Var, Term>) -> Option<BTreeMap<Var, Term>> {
    let mut b = binds.clone();
    match_into(pattern, subject, &mut b).then_some(b)
}

fn resolve(t: &Term, binds: &BTreeMap<Var, Term>) -> Term {
    match t {
        Term::Var(x) => match binds.get(x) {
            Some(u) => resolve(u, binds),
            None => t.clone(),
        },
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| resolve(a, binds)).collect()),
    }
}

fn deref<'a>(t: &'a Term, binds: &'a BTreeMap<Var, Term>) -> &'a Term {
    let mut cur = t;
    while let Term::Var(x) = cur {
        match binds.get(x) {
            Some(u) => cur = u,
            None => break,
        }
    }
    cur
}

/// Most general unifier with occurs check, returned in idempotent form.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut binds: BTreeMap<Var, Term> = BTreeMap::new();
    let mut work = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = work.pop() {
        let a = deref(&a, &binds).clone();
        let b = deref(&b, &binds).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if resolve(other, &binds).contains_var(x) {
                    return None;
                }
                binds.insert(x.clone(), other.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                work.extend(fa.iter().cloned().zip(ga.iter().cloned()));
            }
        }
    }
    let keys: Vec<Var> = binds.keys().cloned().collect();
    Some(keys.into_iter().map(|x| {
        let v = resolve(&Term::Var(x.clone()), &binds);
        (x, v)
    }).collect())
}

/// `s ⊵_emb t`: either both are the same variable, or the roots agree and
/// the arguments embed pointwise, or some argument of `s` embeds `t`.
pub fn hom_embedded(s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Var(_), Term::App(..)) => false,
        (Term::App(f, sa), _) => {
            if let Term::App(g, ta) = t {
                if f == g && sa.len() == ta.len() && sa.iter().zip(ta).all(|(a, b)| hom_embedded(a, b)) {
                    return true;
                }
            }
            sa.iter().any(|a| hom_embedded(a, t))
        }
    }
}

/// Renames every variable of `t` by appending `suffix`.
pub fn rename_apart(t: &Term, suffix: &str) -> Term {
    t.rename_vars(&mut |v| Var::new(&format!("{v}{suffix}")))
}

/// Whether `s` and `t` are equal up to a bijective renaming of variables.
pub fn is_variant(s: &Term, t: &Term) -> bool {
    let mut fwd = BTreeMap::new();
    let mut bwd = BTreeMap::new();
    variant_rec(s, t, &mut fwd, &mut bwd)
}

fn variant_rec(s: &Term, t: &Term, fwd: &mut BTreeMap<Var, Var>, bwd: &mut BTreeMap<Var, Var>) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => {
            let a = fwd.entry(x.clone()).or_insert_with(|| y.clone()) == y;
            let b = bwd.entry(y.clone()).or_insert_with(|| x.clone()) == x;
            a && b
        }
        (Term::App(f, fa), Term::App(g, ga)) => {
            f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(a, b)| variant_rec(a, b, fwd, bwd))
        }
        _ => false,
    }
}
