//! Bundled fixture theories, frames and axiom sets.

use crate::formats::{parse_axioms, parse_frame, parse_theory, FrameFile, TheoryFile};
use crate::theory::EqPresentation;

/// `(file stem, source)` of every bundled theory.
pub const THEORIES: &[(&str, &str)] = &[
    ("blind", include_str!("../fixtures/blind.trs")),
    ("mal", include_str!("../fixtures/mal.trs")),
    ("add", include_str!("../fixtures/add.trs")),
    ("prefix", include_str!("../fixtures/prefix.trs")),
    ("trapdoor", include_str!("../fixtures/trapdoor.trs")),
    ("trapdoor_ext", include_str!("../fixtures/trapdoor_ext.trs")),
    ("strong_secrecy", include_str!("../fixtures/strong_secrecy.trs")),
    ("pair_enc", include_str!("../fixtures/pair_enc.trs")),
    ("encdec", include_str!("../fixtures/encdec.trs")),
    ("group_msg", include_str!("../fixtures/group_msg.trs")),
];

pub const FRAMES: &[(&str, &str)] = &[
    ("phi", include_str!("../fixtures/phi.frame")),
    ("psi", include_str!("../fixtures/psi.frame")),
    ("phi_prime", include_str!("../fixtures/phi_prime.frame")),
    ("psi_prime", include_str!("../fixtures/psi_prime.frame")),
];

pub const AXIOMS: &[(&str, &str)] = &[
    ("keyexch", include_str!("../fixtures/keyexch.eqs")),
    ("comm", include_str!("../fixtures/comm.eqs")),
];

fn lookup<'a>(table: &'a [(&str, &str)], name: &str) -> &'a str {
    table.iter().find(|(n, _)| *n == name).unwrap_or_else(|| panic!("no bundled fixture {name}")).1
}

/// Panics on an unknown name; bundled sources always parse.
pub fn theory(name: &str) -> TheoryFile {
    parse_theory(lookup(THEORIES, name)).expect("bundled theory parses")
}

pub fn frame(name: &str) -> FrameFile {
    parse_frame(lookup(FRAMES, name)).expect("bundled frame parses")
}

pub fn axioms(name: &str) -> EqPresentation {
    parse_axioms(lookup(AXIOMS, name)).expect("bundled axioms parse")
}

/// Bundled theories that are contracting.
pub const CONTRACTING: &[&str] = &["blind", "add", "prefix", "trapdoor_ext", "strong_secrecy", "pair_enc", "encdec", "group_msg"];
