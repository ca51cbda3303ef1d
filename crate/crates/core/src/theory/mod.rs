//! Finite variants, layered systems, permutative theories and unions.

mod combination;
mod fvp;
mod layered;
mod permutative;

pub use combination::{combination_check, CombinationError, CombinationReport, Premise, SharedSymbol};
pub use fvp::{forward_closure_bounded, fvp_sufficient, ForwardClosure, FvpVerdict, DEFAULT_FORWARD_CLOSURE_BOUND};
pub use layered::{
    enumerate_decompositions, fill, layered_check, Decomposition, DecompositionWitness, LayeredError, LayeredVerdict,
    RuleLayering, StepWitness, DEFAULT_DECOMPOSITION_CAP,
};
pub use permutative::{
    check_permutative, deduce_permutative, eq_modulo_permutative, first_non_permutative, permutative_class,
    EqPresentation, PermutativeError, DEFAULT_CLASS_CAP,
};
