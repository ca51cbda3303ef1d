use std::collections::BTreeMap;

use serde::Serialize;

use crate::term::{Symbol, Term, TermGraphMeasures};

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("symbol `{0}` is not declared")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has arity {expected} but is used with {found} arguments")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("symbol `{symbol}` declared with conflicting arities {first} and {second}")]
    ConflictingArity { symbol: String, first: usize, second: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymbolInfo {
    pub arity: usize,
    pub public: bool,
}

/// Declared symbols with arities and visibility. Constants double as names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    symbols: BTreeMap<Symbol, SymbolInfo>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a symbol. Redeclaring with the same arity updates visibility.
    pub fn declare(&mut self, name: &str, arity: usize, public: bool) -> Result<(), SignatureError> {
        let sym = Symbol::new(name);
        if let Some(info) = self.symbols.get_mut(&sym) {
            if info.arity != arity {
                return Err(SignatureError::ConflictingArity {
                    symbol: name.to_string(),
                    first: info.arity,
                    second: arity,
                });
            }
            info.public = public;
            return Ok(());
        }
        self.symbols.insert(sym, SymbolInfo { arity, public });
        Ok(())
    }

    /// Builds a signature from the symbols occurring in `terms`, all public.
    pub fn infer<'a, I: IntoIterator<Item = &'a Term>>(terms: I) -> Result<Self, SignatureError> {
        let mut sig = Signature::new();
        for t in terms {
            sig.absorb(t)?;
        }
        Ok(sig)
    }

    /// Adds every symbol of `t` not yet declared, checking arities of the rest.
    pub fn absorb(&mut self, t: &Term) -> Result<(), SignatureError> {
        let mut err = None;
        t.walk(&mut |s| {
            if let Term::App(f, args) = s {
                if err.is_some() {
                    return;
                }
                match self.symbols.get(f) {
                    Some(info) if info.arity != args.len() => {
                        err = Some(SignatureError::ConflictingArity {
                            symbol: f.to_string(),
                            first: info.arity,
                            second: args.len(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        self.symbols.insert(f.clone(), SymbolInfo { arity: args.len(), public: true });
                    }
                }
            }
        });
        err.map_or(Ok(()), Err)
    }

    /// Union of two signatures; arities must agree, and a symbol private in
    /// either is private in the result.
    pub fn merge(&self, other: &Signature) -> Result<Signature, SignatureError> {
        let mut out = self.clone();
        for (f, info) in &other.symbols {
            match out.symbols.get_mut(f) {
                Some(mine) if mine.arity != info.arity => {
                    return Err(SignatureError::ConflictingArity {
                        symbol: f.to_string(),
                        first: mine.arity,
                        second: info.arity,
                    })
                }
                Some(mine) => mine.public &= info.public,
                None => {
                    out.symbols.insert(f.clone(), *info);
                }
            }
        }
        Ok(out)
    }

    pub fn get(&self, f: &Symbol) -> Option<SymbolInfo> {
        self.symbols.get(f).copied()
    }

    pub fn arity(&self, f: &Symbol) -> Option<usize> {
        self.symbols.get(f).map(|i| i.arity)
    }

    pub fn contains(&self, f: &Symbol) -> bool {
        self.symbols.contains_key(f)
    }

    pub fn is_public(&self, f: &Symbol) -> bool {
        self.symbols.get(f).is_some_and(|i| i.public)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &SymbolInfo)> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter().filter(|(_, i)| i.arity == 0).map(|(f, _)| f)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.values().map(|i| i.arity).max().unwrap_or(0)
    }

    /// Checks that `t` only uses declared symbols at their declared arity.
    pub fn check_term(&self, t: &Term) -> Result<(), SignatureError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let info = self.symbols.get(f).ok_or_else(|| SignatureError::UnknownSymbol(f.to_string()))?;
                if info.arity != args.len() {
                    return Err(SignatureError::ArityMismatch {
                        symbol: f.to_string(),
                        expected: info.arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| self.check_term(a))
            }
        }
    }

    pub fn is_well_formed(&self, t: &Term) -> bool {
        self.check_term(t).is_ok()
    }

    /// Measures of a term validated against this signature.
    pub fn measures(&self, t: &Term) -> Result<TermGraphMeasures, SignatureError> {
        self.check_term(t)?;
        Ok(t.measures())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn measures_reject_ill_formed_terms() {
        let mut sig = Signature::new();
        sig.declare("enc", 2, true).unwrap();
        sig.declare("a", 0, true).unwrap();
        assert!(sig.measures(&parse_term("enc(a,a)").unwrap()).is_ok());
        assert!(matches!(
            sig.measures(&parse_term("enc(a,a,a)").unwrap()),
            Err(SignatureError::ArityMismatch { .. })
        ));
        assert!(matches!(sig.measures(&parse_term("b").unwrap()), Err(SignatureError::UnknownSymbol(_))));
    }

    #[test]
    fn inference_detects_conflicts() {
        let a = parse_term("f(a,b)").unwrap();
        let b = parse_term("f(a)").unwrap();
        assert!(Signature::infer([&a]).is_ok());
        assert!(Signature::infer([&a, &b]).is_err());
    }

    #[test]
    fn merge_keeps_privacy() {
        let mut s1 = Signature::new();
        s1.declare("k", 0, false).unwrap();
        let mut s2 = Signature::new();
        s2.declare("k", 0, true).unwrap();
        s2.declare("g", 1, true).unwrap();
        let m = s1.merge(&s2).unwrap();
        assert!(!m.is_public(&Symbol::new("k")));
        assert_eq!(m.arity(&Symbol::new("g")), Some(1));
    }
}
