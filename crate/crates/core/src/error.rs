use thiserror::Error;

use crate::model::{AgentId, Coalition, Violation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid game: {}", join_violations(.0))]
    InvalidGame(Vec<Violation>),

    #[error("agent {agent} is not a member of coalition {coalition}")]
    AgentNotInCoalition {
        agent: AgentId,
        coalition: Coalition,
    },

    #[error("agent {agent} is out of range for a game with {n} agents")]
    AgentOutOfRange { agent: AgentId, n: usize },

    #[error("resolution does not match the stranger pairs of the game")]
    IncompleteResolution,

    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("coalition must not be empty")]
    EmptyCoalition,

    #[error("refusing to enumerate 2^{bits} resolutions (cap: 2^{cap})")]
    TooManyResolutions { bits: usize, cap: usize },

    #[error("refusing to sweep 2^{agents} coalitions (cap: 2^{cap})")]
    TooManyCoalitions { agents: usize, cap: usize },

    #[error("refusing to enumerate Bell({agents}) partitions (cap: {cap} agents)")]
    TooManyPartitions { agents: usize, cap: usize },

    #[error("oracle needs about {steps} steps, over the limit of {limit}")]
    StepLimit { steps: u128, limit: u128 },

    #[error("condition is only defined for symmetric games")]
    AsymmetricGame,

    #[error("{notion} is not handled by {routine}")]
    UnsupportedNotion {
        notion: &'static str,
        routine: &'static str,
    },

    #[error("canonical forms are limited to {cap} agents, got {agents}")]
    CanonicalFormCap { agents: usize, cap: usize },

    #[error("invalid densities: {0}")]
    InvalidDensities(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
