//! Crate-wide error type.

use crate::lang::{ContextId, PredicateId, ProcedureId, PropertyId, StateId};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("event member {index} lies outside a sample space of {space_len} points")]
    MemberOutOfSpace { index: usize, space_len: usize },

    #[error("conditioning event has probability zero: {what}")]
    ZeroConditioningEvent { what: String },

    #[error("sample space has {len} points, exceeding the cap of {max}")]
    SpaceTooLarge { len: usize, max: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("unknown predicate {0}")]
    UnknownPredicate(PredicateId),

    #[error("predicate {0} is already registered")]
    DuplicatePredicate(PredicateId),

    #[error("extension of {pred} contains point {index} outside the universe")]
    ExtensionOutsideUniverse { pred: PredicateId, index: usize },

    #[error("probability space points do not match the model universe: {0}")]
    UniverseMismatch(String),

    #[error("unknown property {0}")]
    UnknownProperty(PropertyId),

    #[error("unknown context {0}")]
    UnknownContext(ContextId),

    #[error("unknown procedure {0}")]
    UnknownProcedure(ProcedureId),

    #[error("unknown state {0}")]
    UnknownState(StateId),

    #[error("no measurement procedure measures property {0}")]
    NoProcedure(PropertyId),

    #[error("formulas are not jointly testable: {0}")]
    NotJointlyTestable(String),

    #[error("state {state} is outside the domain of the transform for property {property}")]
    NotInDomain {
        state: StateId,
        property: PropertyId,
    },

    #[error("postcondition violated: {0}")]
    PostconditionViolated(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("measurement branch has probability too close to zero")]
    ZeroProbabilityBranch,

    #[error("matrix is not a projector: {0}")]
    NotAProjector(String),

    #[error("matrix is not a density operator: {0}")]
    NotADensityOperator(String),

    #[error("lattice is malformed: {0}")]
    MalformedLattice(String),

    #[error("procedure group {group} contains incompatible properties {a} and {b}")]
    IncompatibleGroup {
        group: usize,
        a: PropertyId,
        b: PropertyId,
    },

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
