//! Friend- and enemy-oriented hedonic games with strangers.
//!
//! Every agent classifies every other agent as a friend, an enemy, or a
//! stranger. Strangers turn into friends or enemies once the coalitions have
//! formed, so a partition is *possibly* stable when some resolution of the
//! strangers makes it stable and *necessarily* stable when every resolution
//! does.
//!
//! The crate is split along those lines:
//!
//! - [`model`]: games, coalitions, partitions and utilities.
//! - [`resolution`]: assignments of stranger relations and the four extreme
//!   resolutions used by the verifiers.
//! - [`verify`]: polynomial-time blocking tests and per-partition verdicts for
//!   IR, NS, IS, CIS, CS, SCS and INS in both modes.
//! - [`exist`]: existence checks, constructions and the counterexample search.
//! - [`oracle`]: a deliberately naive evaluator that exhausts resolutions and
//!   partitions, used to cross-check everything above.
//! - [`random`]: seeded random game generation.

pub mod error;
pub mod exist;
#[cfg(test)]
mod fixtures;
pub mod model;
pub mod oracle;
pub mod random;
pub mod resolution;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    utility, validate_game, AgentId, Coalition, Game, GameBuilder, Orientation, Partition,
    RelationKind, Violation,
};
pub use resolution::{Outcome, Resolution, ResolutionMode};
pub use verify::{Mode, Notion, StabilityQuery, Verdict, Witness};
