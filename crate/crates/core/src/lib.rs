//! Staged construction of asymptotic bases of the integers whose
//! representation function matches a prescribed target, together with
//! brute-force verification of every invariant the construction relies on.
//!
//! The pipeline is:
//!
//! * [`repcore`]: finite integer sets, representation and counting
//!   functions, the prescribed target `f` and its enumeration `u_1, u_2, ...`.
//! * [`sidon`]: Sidon set generators (greedy and Erdős–Turán) used to add
//!   density.
//! * [`construct`]: the alternating build of nested stages
//!   `A_1 ⊆ A_2 ⊆ ...` with density checkpoints `x_1 < x_2 < ...`.
//! * [`verify`]: independent oracles that re-check a finished trace.
//! * [`cli`]: the `repbasis` command-line front end.

pub mod cli;
pub mod construct;
pub mod repcore;
pub mod sidon;
pub mod verify;

pub use construct::{build, ConstructionTrace, StageKind, StageRecord};
pub use repcore::{FiniteBasis, Multiplicity, Phi, RepTarget, TargetSequence};
pub use verify::{check_invariants, InvariantReport};
