use serde::Serialize;

use super::Trs;
use crate::matching::{rename_apart, unify};
use crate::term::{Position, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    /// Rule applied at the root of the peak (0-based).
    pub outer: usize,
    /// Rule applied at `position` inside the peak (0-based).
    pub inner: usize,
    pub position: Position,
    pub peak: Term,
    pub left: Term,
    pub right: Term,
}

impl CriticalPair {
    pub fn is_trivial(&self) -> bool {
        self.left == self.right
    }
}

/// Overlaps of every lhs into every other lhs at non-variable positions, with
/// the rules renamed apart. The root overlap of a rule with itself is skipped.
pub fn critical_pairs(trs: &Trs) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    let rules = trs.rules();
    for (i, outer) in rules.iter().enumerate() {
        let l1 = rename_apart(&outer.lhs, "_1");
        let r1 = rename_apart(&outer.rhs, "_1");
        for (j, inner) in rules.iter().enumerate() {
            let l2 = rename_apart(&inner.lhs, "_2");
            let r2 = rename_apart(&inner.rhs, "_2");
            for p in l1.positions() {
                if i == j && p.is_root() {
                    continue;
                }
                let sub = l1.at(&p).expect("position from term");
                if sub.is_var() {
                    continue;
                }
                if let Some(theta) = unify(sub, &l2) {
                    let peak = theta.apply(&l1);
                    let left = theta.apply(&r1);
                    let right = peak.replace_at(&p, theta.apply(&r2)).expect("position from term");
                    out.push(CriticalPair { outer: i, inner: j, position: p, peak, left, right });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_overlap_below_root() {
        let r = Trs::parse_rules(&["f(f(X)) -> X"]).unwrap();
        let cps = critical_pairs(&r);
        assert_eq!(cps.len(), 1);
        assert_eq!(cps[0].position, Position(vec![1]));
        assert_eq!(cps[0].peak.size(), 4);
    }

    #[test]
    fn disjoint_lhs_have_no_pairs() {
        let r = Trs::parse_rules(&["dec(enc(X,Y),Y) -> X", "mal(enc(X,Y),Z) -> enc(Z,Y)"]).unwrap();
        assert!(critical_pairs(&r).is_empty());
    }

    #[test]
    fn root_overlap_between_distinct_rules() {
        let r = Trs::parse_rules(&["f(X,a) -> X", "f(b,Y) -> Y"]).unwrap();
        let cps = critical_pairs(&r);
        // f(b,a): both directions of the root overlap
        assert_eq!(cps.len(), 2);
        assert!(cps.iter().all(|c| c.peak.to_string() == "f(b,a)"));
        assert!(cps.iter().all(|c| !c.is_trivial()));
    }
}
