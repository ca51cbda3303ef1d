use std::collections::{BTreeSet, HashMap};

use super::{Frame, KnowledgeError};
use crate::gemb::{perm_class, reachable_well_formed};
use crate::signature::Signature;
use crate::term::Term;

pub const DEFAULT_GST_CAP: usize = 50_000;

fn gst_into(
    sig: &Signature,
    t: &Term,
    cap: usize,
    memo: &mut HashMap<Term, BTreeSet<Term>>,
) -> Result<BTreeSet<Term>, KnowledgeError> {
    if let Some(s) = memo.get(t) {
        return Ok(s.clone());
    }
    let mut out = BTreeSet::new();
    if t.is_leaf() {
        out.insert(t.clone());
    } else {
        let reach = reachable_well_formed(sig, t, cap).map_err(|e| match e {
            crate::gemb::GembError::StateCap(_) => KnowledgeError::GstOverflow { cap },
            e => e.into(),
        })?;
        for s in reach {
            for u in perm_class(&s, false)? {
                if sig.is_well_formed(&u) {
                    out.insert(u);
                }
            }
            if out.len() > cap {
                return Err(KnowledgeError::GstOverflow { cap });
            }
        }
        for a in t.args() {
            out.extend(gst_into(sig, a, cap, memo)?);
        }
    }
    if out.len() > cap {
        return Err(KnowledgeError::GstOverflow { cap });
    }
    memo.insert(t.clone(), out.clone());
    Ok(out)
}

/// Graph-embedded subterms of a ground term: everything reachable by schema
/// steps and permutations that is well formed, plus the same for subterms.
pub fn gst(sig: &Signature, t: &Term, cap: usize) -> Result<BTreeSet<Term>, KnowledgeError> {
    if !t.is_ground() {
        return Err(KnowledgeError::NonGround(t.clone()));
    }
    gst_into(sig, t, cap, &mut HashMap::new())
}

/// Union of `gst` over the frame's range.
pub fn gst_frame(sig: &Signature, frame: &Frame, cap: usize) -> Result<BTreeSet<Term>, KnowledgeError> {
    let mut memo = HashMap::new();
    let mut out = BTreeSet::new();
    for (_, t) in frame.bindings() {
        out.extend(gst_into(sig, t, cap, &mut memo)?);
        if out.len() > cap {
            return Err(KnowledgeError::GstOverflow { cap });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn sig(ts: &[&str]) -> Signature {
        let terms: Vec<Term> = ts.iter().map(|s| t(s)).collect();
        Signature::infer(terms.iter()).unwrap()
    }

    #[test]
    fn examples() {
        let s = sig(&["enc(a,n)", "sign(a,k)"]);
        let g = gst(&s, &t("enc(a,n)"), DEFAULT_GST_CAP).unwrap();
        assert_eq!(g, ["enc(a,n)", "enc(n,a)", "a", "n"].iter().map(|x| t(x)).collect());
        assert_eq!(gst(&s, &t("a"), DEFAULT_GST_CAP).unwrap(), [t("a")].into_iter().collect());
        let g = gst(&s, &t("sign(a,k)"), DEFAULT_GST_CAP).unwrap();
        for x in ["sign(a,k)", "sign(k,a)", "a", "k"] {
            assert!(g.contains(&t(x)), "{x}");
        }
        assert!(gst(&s, &t("enc(X,a)"), DEFAULT_GST_CAP).is_err());
    }

    #[test]
    fn nested_terms_hoist() {
        let s = sig(&["f(g(a,b),c)", "g(a,b)", "f(a,b)"]);
        let g = gst(&s, &t("f(g(a,b),c)"), DEFAULT_GST_CAP).unwrap();
        // hoisting with the parent symbol is not well formed (arity 3), the
        // child-symbol variant g(a,b,c) is not either; projections are
        for x in ["g(a,b)", "g(b,a)", "f(a,c)", "f(c,b)", "a", "b", "c", "f(g(b,c),a)"] {
            assert!(g.contains(&t(x)), "{x}");
        }
        assert!(g.iter().all(|u| s.is_well_formed(u)));
    }

    #[test]
    fn cap_overflow_is_reported() {
        let s = sig(&["f(a,b,c,d,e)"]);
        assert!(matches!(gst(&s, &t("f(a,b,c,d,e)"), 10), Err(KnowledgeError::GstOverflow { .. })));
    }
}
