//! Exact arithmetic over finite integer sets.
//!
//! Everything here is a pure function on immutable values, with the single
//! exception of [`TargetSequence`], which grows its emitted prefix in place
//! and is therefore meant to have one owner.

mod basis;
mod phi;
mod target;

pub use basis::{
    counting, counting_closed, rep_function, rep_profile, FiniteBasis, RepProfile, ELEMENT_LIMIT,
};
pub use phi::{density_bound, exceeds_density_bound, Phi, PhiParseError, DENSITY_MARGIN};
pub use target::{
    occurrences, spiral, target_prefix, Multiplicity, RepTarget, TargetError, TargetSequence,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("representation profile of the empty set is undefined")]
    EmptySet,
    #[error("set elements must be strictly increasing (offending index {0})")]
    NotStrictlyIncreasing(usize),
    #[error("set element at index {0} exceeds the supported magnitude")]
    OutOfRange(usize),
}
