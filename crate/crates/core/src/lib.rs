//! Finite contextual probability models.
//!
//! The crate builds classical probability models in which measurable
//! properties carry a microscopic context index, measurement procedures
//! average over weighted context sets, and the resulting mean conditional
//! probabilities are compared against a finite-dimensional quantum backend.
//! Model construction schemes in [`embed`] reproduce a quantum model's Born
//! statistics exactly (or within stated bounds) from purely classical
//! ingredients, which is the point of the exercise: the averaged quantities
//! need not obey the classical axioms even though every ingredient does.
//!
//! All classical arithmetic is exact (arbitrary-precision rationals); the
//! quantum side uses dense complex doubles with explicit tolerances.
//! Everything is immutable after construction and safe to share across
//! threads.

pub mod embed;
pub mod error;
pub mod lang;
pub mod measurement;
pub mod muprob;
pub mod prob;
pub mod qstruct;
pub mod quantum;
pub mod rational;
pub mod report;
pub mod runner;
pub mod scenario;

pub use error::{Error, Result};
