use thiserror::Error;

use crate::atom::Atom;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("{atom} is not an element of {what}")]
    NotMember { atom: Atom, what: String },
    #[error("morphism is not vertical")]
    NotVertical,
    #[error("not a refined object: {witness} is in Q but its context is not in P")]
    NotRefined { witness: Atom },
    #[error("sharing condition violated: {0}")]
    SharingMismatch(String),
    #[error("predicate lifting is unsound: {counterexample}")]
    LiftingUnsound { counterexample: String },
    #[error("map is not monotone: {witness}")]
    NotMonotone { witness: String },
    #[error("not a pointed partial order: {0}")]
    NotPoset(String),
    #[error("morphism does not preserve predicates: {0}")]
    NotPredicatePreserving(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
