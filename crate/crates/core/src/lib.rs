//! Graph-embedded and contracting term rewrite systems, and the knowledge
//! problems (deduction, static equivalence, cap) they make decidable.

pub mod catalog;
pub mod contracting;
pub mod formats;
pub mod gemb;
pub mod knowledge;
pub mod matching;
pub mod mpcp;
pub mod rewriting;
pub mod signature;
pub mod syntax;
pub mod term;
pub mod theory;

pub use rewriting::{Rule, Trs};
pub use signature::Signature;
pub use term::{Context, Position, Substitution, Symbol, Term, Var};
