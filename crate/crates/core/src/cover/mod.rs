//! Group actions, quotient graphs, covering maps, tree lifting and pattern sets.

mod action;
mod map;
mod quotient;
mod registry;

pub use action::{Generator, GroupAction};
pub use map::{CoverReport, CoveringMap, LiftedTree, PatternSet, Projection, Tree};
pub use quotient::{quotient, QuotientGraph, QUOTIENT_CHECK_RADIUS};
pub use registry::{builtin_pair, fingerprint, fingerprint_classes, CoverPair, BUILTIN_PAIRS};

use crate::graph::GraphError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("generator {generator} is not an automorphism (witness {witness})")]
    NotAutomorphism { generator: String, witness: String },
    #[error("action is not free (witness {witness})")]
    NotFree { witness: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input is not a tree containing its root")]
    NotATree,
    #[error("weak lifting violated at {at} towards {towards}")]
    WeakLiftingViolated { at: String, towards: String },
    #[error("invalid lift: {0}")]
    InvalidLift(String),
    #[error("no group element found within word length {max_len}")]
    ElementNotFound { max_len: usize },
    #[error("lifts through distinct fibre points meet at {witness}")]
    LiftsMeet { witness: String },
    #[error("no same-fibre partner within distance {cap} of {witness}; fibres not shown tame")]
    NotTame { cap: usize, witness: String },
    #[error("pattern set verification failed at {x} with r={r}: {detail}")]
    PatternFailed { x: String, r: usize, detail: String },
    #[error("unknown pair `{0}`")]
    UnknownPair(String),
}
