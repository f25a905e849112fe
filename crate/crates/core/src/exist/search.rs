//! Search for symmetric games without a necessarily core stable partition.

use std::fmt;
use std::str::FromStr;

use super::canon::{shape_levels, shapes_to_games, GameFamily, StrangerPairs};
use crate::error::Result;
use crate::model::{Game, Orientation};
use crate::oracle::{enumerate_partitions, oracle_exists, OracleBudget};
use crate::resolution::ResolutionMode;
use crate::verify::{verify_group, Mode, Notion, StabilityQuery, VerifyOptions};

/// Named restrictions under which games without a necessarily core stable
/// partition are known to exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchPreset {
    /// Friend oriented; every agent has at most one stranger and more known
    /// friends than strangers. CLI name `thm9`.
    FriendOrientedMatching,
    /// Enemy oriented; as above, with exactly one stranger pair in total.
    /// CLI name `thm10`.
    EnemyOrientedSinglePair,
}

impl SearchPreset {
    pub fn constraints(self) -> SearchConstraints {
        match self {
            SearchPreset::FriendOrientedMatching => GameFamily {
                orientation: Orientation::FriendOriented,
                max_strangers_per_agent: Some(1),
                stranger_pairs: StrangerPairs::Any,
                friends_exceed_strangers: true,
            },
            SearchPreset::EnemyOrientedSinglePair => GameFamily {
                orientation: Orientation::EnemyOriented,
                max_strangers_per_agent: Some(1),
                stranger_pairs: StrangerPairs::Exactly(1),
                friends_exceed_strangers: true,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SearchPreset::FriendOrientedMatching => "thm9",
            SearchPreset::EnemyOrientedSinglePair => "thm10",
        }
    }
}

impl fmt::Display for SearchPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SearchPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "thm9" => Ok(SearchPreset::FriendOrientedMatching),
            "thm10" => Ok(SearchPreset::EnemyOrientedSinglePair),
            _ => Err(format!("unknown preset `{s}` (expected thm9 or thm10)")),
        }
    }
}

pub type SearchConstraints = GameFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest agent count whose partitions are enumerated.
    pub partition_cap: usize,
    pub verify: VerifyOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            partition_cap: 10,
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub game: Game,
    /// The oracle independently found no necessarily core stable partition.
    pub oracle_confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub found: Option<Counterexample>,
    /// Games checked per agent count, in increasing agent count.
    pub examined: Vec<(usize, usize)>,
    /// Largest agent count searched exhaustively.
    pub searched_up_to: usize,
    /// False when `n_max` exceeded the partition cap.
    pub complete: bool,
}

fn has_ncs_partition(game: &Game, opts: &SearchOptions) -> Result<bool> {
    let budget = OracleBudget {
        max_agents: opts.partition_cap,
        ..OracleBudget::default()
    };
    for p in enumerate_partitions(game.agent_count(), &budget)? {
        if verify_group(game, &p, Notion::Cs, Mode::Necessary, &opts.verify)?.is_stable() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks every game of `constraints` with up to `n_max` agents, smallest
/// first and in canonical order within a size, and returns the first one
/// with no necessarily core stable partition.
pub fn search_no_ncs_counterexample(
    constraints: &SearchConstraints,
    n_max: usize,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    let reachable = n_max.min(opts.partition_cap);
    let levels = shape_levels(constraints, reachable)?;
    let mut examined = Vec::new();
    for (k, shapes) in levels.iter().enumerate() {
        let n = k + 1;
        let mut count = 0;
        for game in shapes_to_games(constraints, shapes) {
            count += 1;
            if !has_ncs_partition(&game, opts)? {
                examined.push((n, count));
                let budget = OracleBudget {
                    max_agents: opts.partition_cap,
                    ..OracleBudget::default()
                };
                let query = StabilityQuery::new(Notion::Cs, Mode::Necessary);
                let oracle_confirmed =
                    oracle_exists(&game, query, ResolutionMode::Joint, &budget)?.is_none();
                return Ok(SearchReport {
                    found: Some(Counterexample {
                        game,
                        oracle_confirmed,
                    }),
                    examined,
                    searched_up_to: n,
                    complete: reachable == n_max,
                });
            }
        }
        examined.push((n, count));
    }
    Ok(SearchReport {
        found: None,
        examined,
        searched_up_to: reachable,
        complete: reachable == n_max,
    })
}
