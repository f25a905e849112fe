//! Exhaustive, definition-level evaluator.
//!
//! Nothing here reuses the bitset arithmetic of [`crate::verify`]: utilities
//! are recomputed from a plain value table built out of the public relation
//! and resolution accessors, coalitions are plain agent lists, and every
//! notion is checked by trying every deviation the definition allows. It is
//! slow on purpose and meant as ground truth for tests.

use crate::error::{Error, Result};
use crate::model::{AgentId, Game, Partition, RelationKind};
use crate::resolution::{Outcome, Resolution, ResolutionMode};
use crate::verify::{Mode, Notion, StabilityQuery};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_agents: usize,
    pub max_resolution_bits: usize,
    /// Upper bound on (partitions ×) resolutions × coalitions examined.
    pub step_limit: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_agents: 10,
            max_resolution_bits: 20,
            step_limit: 1 << 40,
        }
    }
}

impl OracleBudget {
    fn check_agents(&self, n: usize) -> Result<()> {
        if n > self.max_agents {
            return Err(Error::TooManyPartitions {
                agents: n,
                cap: self.max_agents,
            });
        }
        Ok(())
    }

    fn charge(&self, steps: u128) -> Result<()> {
        if steps > self.step_limit {
            return Err(Error::StepLimit {
                steps,
                limit: self.step_limit,
            });
        }
        Ok(())
    }
}

/// All set partitions of `n` agents, in restricted-growth-string order.
pub struct Partitions {
    labels: Vec<usize>,
    done: bool,
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition::from_labels(&self.labels);
        // advance: bump the last position that may still grow
        let n = self.labels.len();
        let mut advanced = false;
        for i in (1..n).rev() {
            let ceiling = self.labels[..i].iter().max().copied().unwrap_or(0) + 1;
            if self.labels[i] < ceiling {
                self.labels[i] += 1;
                for l in &mut self.labels[i + 1..] {
                    *l = 0;
                }
                advanced = true;
                break;
            }
        }
        self.done = !advanced;
        Some(current)
    }
}

/// Enumerates all Bell(n) partitions, starting with the grand coalition and
/// ending with the singletons.
pub fn enumerate_partitions(n: usize, budget: &OracleBudget) -> Result<Partitions> {
    budget.check_agents(n)?;
    if n == 0 {
        return Err(Error::InvalidPartition(
            "a partition needs at least one agent".into(),
        ));
    }
    Ok(Partitions {
        labels: vec![0; n],
        done: false,
    })
}

/// Value of every agent for every other agent under one resolution.
struct Values {
    v: Vec<Vec<i64>>,
}

impl Values {
    fn new(game: &Game, resolution: &Resolution) -> Result<Self> {
        let n = game.agent_count();
        let weight = n as i64;
        let (friend, enemy) = match game.orientation() {
            crate::model::Orientation::FriendOriented => (weight, -1),
            crate::model::Orientation::EnemyOriented => (1, -weight),
        };
        let mut v = vec![vec![0; n]; n];
        for (i, row) in v.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i == j {
                    continue;
                }
                let rel = match game.relation(AgentId(i), AgentId(j)) {
                    RelationKind::Friend => Outcome::Friendship,
                    RelationKind::Enemy => Outcome::Enmity,
                    RelationKind::Stranger => resolution
                        .outcome(AgentId(i), AgentId(j))
                        .ok_or(Error::IncompleteResolution)?,
                };
                *cell = match rel {
                    Outcome::Friendship => friend,
                    Outcome::Enmity => enemy,
                };
            }
        }
        Ok(Values { v })
    }

    fn utility(&self, i: usize, coalition: &[usize]) -> i64 {
        coalition
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| self.v[i][j])
            .sum()
    }
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn all_coalitions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..1 << n).map(move |m| members(m, n))
}

fn blocks(values: &Values, home: &[Vec<usize>], coalition: &[usize], weak: bool) -> bool {
    let mut strict = false;
    for &i in coalition {
        let new = values.utility(i, coalition);
        let old = values.utility(i, &home[i]);
        if new < old || (!weak && new == old) {
            return false;
        }
        strict |= new > old;
    }
    strict
}

/// Whether `partition` is `notion`-stable under one fixed resolution,
/// checked straight from the definition.
pub fn oracle_stable(
    game: &Game,
    partition: &Partition,
    notion: Notion,
    resolution: &Resolution,
    budget: &OracleBudget,
) -> Result<bool> {
    let n = game.agent_count();
    budget.check_agents(n)?;
    if partition.agent_count() != n {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} agents, game has {n}",
            partition.agent_count()
        )));
    }
    let values = Values::new(game, resolution)?;
    let groups: Vec<Vec<usize>> = partition
        .coalitions()
        .iter()
        .map(|c| c.iter().map(|a| a.0).collect())
        .collect();
    let home: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            groups
                .iter()
                .find(|g| g.contains(&i))
                .cloned()
                .expect("partition covers agent")
        })
        .collect();

    Ok(match notion {
        Notion::Ir => (0..n).all(|i| values.utility(i, &home[i]) >= 0),
        Notion::Ns | Notion::Is | Notion::Cis => {
            let mut targets: Vec<Vec<usize>> = groups.clone();
            targets.push(Vec::new());
            !(0..n).any(|i| {
                targets.iter().filter(|t| **t != home[i]).any(|t| {
                    let mut joined = t.clone();
                    joined.push(i);
                    let wants = values.utility(i, &joined) > values.utility(i, &home[i]);
                    let welcome = t
                        .iter()
                        .all(|&j| values.utility(j, &joined) >= values.utility(j, t));
                    let left: Vec<usize> = home[i].iter().copied().filter(|&k| k != i).collect();
                    let released = left
                        .iter()
                        .all(|&k| values.utility(k, &left) >= values.utility(k, &home[i]));
                    match notion {
                        Notion::Ns => wants,
                        Notion::Is => wants && welcome,
                        _ => wants && welcome && released,
                    }
                })
            })
        }
        Notion::Cs | Notion::Scs => {
            let weak = notion == Notion::Scs;
            !all_coalitions(n).any(|c| blocks(&values, &home, &c, weak))
        }
        Notion::Ins => groups.iter().all(|g| {
            let size = g.len();
            !(1u64..(1 << size) - 1).any(|m| {
                let d: Vec<usize> = (0..size)
                    .filter(|&p| m >> p & 1 == 1)
                    .map(|p| g[p])
                    .collect();
                d.iter()
                    .all(|&i| values.utility(i, &d) > values.utility(i, g))
            })
        }),
    })
}

/// Every resolution of `game`'s strangers. In joint mode a mutual stranger
/// pair takes one outcome for both directions.
pub fn oracle_resolutions(
    game: &Game,
    mode: ResolutionMode,
    budget: &OracleBudget,
) -> Result<Vec<Resolution>> {
    let n = game.agent_count();
    let mut choices: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || game.relation(AgentId(i), AgentId(j)) != RelationKind::Stranger {
                continue;
            }
            let tied = mode == ResolutionMode::Joint
                && game.relation(AgentId(j), AgentId(i)) == RelationKind::Stranger;
            if tied && j < i {
                continue;
            }
            choices.push((i, j));
        }
    }
    if choices.len() > budget.max_resolution_bits {
        return Err(Error::TooManyResolutions {
            bits: choices.len(),
            cap: budget.max_resolution_bits,
        });
    }
    let outcome_of = |code: u64, i: usize, j: usize| {
        let (a, b) = if mode == ResolutionMode::Joint
            && game.relation(AgentId(j), AgentId(i)) == RelationKind::Stranger
        {
            (i.min(j), i.max(j))
        } else {
            (i, j)
        };
        let k = choices
            .iter()
            .position(|&p| p == (a, b))
            .expect("stranger pair has a choice");
        if code >> k & 1 == 1 {
            Outcome::Friendship
        } else {
            Outcome::Enmity
        }
    };
    Ok((0u64..1 << choices.len())
        .map(|code| Resolution::from_fn(game, |i, j| outcome_of(code, i.0, j.0)))
        .collect())
}

fn sweep_cost(game: &Game, notion: Notion) -> u128 {
    let n = game.agent_count() as u32;
    if notion.is_individual() {
        u128::from(n * n + 1)
    } else {
        1u128 << n
    }
}

/// Possible: stable under some resolution. Necessary: under all of them.
pub fn oracle_mode(
    game: &Game,
    partition: &Partition,
    query: StabilityQuery,
    mode: ResolutionMode,
    budget: &OracleBudget,
) -> Result<bool> {
    let resolutions = oracle_resolutions(game, mode, budget)?;
    budget.charge(resolutions.len() as u128 * sweep_cost(game, query.notion))?;
    let mut verdicts = resolutions
        .iter()
        .map(|r| oracle_stable(game, partition, query.notion, r, budget));
    match query.mode {
        Mode::Possible => {
            for v in &mut verdicts {
                if v? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Mode::Necessary => {
            for v in &mut verdicts {
                if !v? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// The first partition (in restricted-growth order) satisfying `query`.
pub fn oracle_exists(
    game: &Game,
    query: StabilityQuery,
    mode: ResolutionMode,
    budget: &OracleBudget,
) -> Result<Option<Partition>> {
    let n = game.agent_count();
    let resolutions = oracle_resolutions(game, mode, budget)?;
    let bell = enumerate_partitions(n, budget)?.count() as u128;
    budget.charge(bell * resolutions.len() as u128 * sweep_cost(game, query.notion))?;
    for p in enumerate_partitions(n, budget)? {
        if oracle_mode(game, &p, query, mode, budget)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Coalition, GameBuilder, Orientation};
    use crate::resolution::{all_enemies, all_friends};
    use proptest::prelude::*;

    fn part(n: usize, groups: &[&[usize]]) -> Partition {
        Partition::from_coalitions(
            n,
            groups
                .iter()
                .map(|g| g.iter().map(|&a| AgentId(a)).collect::<Coalition>()),
        )
        .unwrap()
    }

    #[test]
    fn bell_numbers() {
        let b = OracleBudget::default();
        let counts: Vec<usize> = (1..=7)
            .map(|n| enumerate_partitions(n, &b).unwrap().count())
            .collect();
        assert_eq!(counts, [1, 2, 5, 15, 52, 203, 877]);
    }

    #[test]
    fn two_agent_partitions() {
        let all: Vec<String> = enumerate_partitions(2, &OracleBudget::default())
            .unwrap()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(all, ["{1,2}", "{1} {2}"]);
    }

    #[test]
    fn partitions_are_distinct() {
        let all: Vec<Partition> = enumerate_partitions(5, &OracleBudget::default())
            .unwrap()
            .collect();
        for (a, p) in all.iter().enumerate() {
            assert!(all[a + 1..].iter().all(|q| q != p));
        }
    }

    #[test]
    fn agent_cap_is_enforced() {
        let b = OracleBudget {
            max_agents: 3,
            ..OracleBudget::default()
        };
        assert!(matches!(
            enumerate_partitions(4, &b),
            Err(Error::TooManyPartitions { agents: 4, cap: 3 })
        ));
    }

    #[test]
    fn star_entry_under_friendship() {
        let g = fixtures::star_with_stranger_leaves();
        let p = part(3, &[&[0, 1], &[2]]);
        let b = OracleBudget::default();
        assert!(!oracle_stable(&g, &p, Notion::Is, &all_friends(&g), &b).unwrap());
    }

    #[test]
    fn singletons_are_individually_rational() {
        let g = fixtures::two_pairs_with_bridge(Orientation::EnemyOriented);
        let b = OracleBudget::default();
        for r in oracle_resolutions(&g, ResolutionMode::Joint, &b).unwrap() {
            assert!(oracle_stable(&g, &Partition::singletons(5), Notion::Ir, &r, &b).unwrap());
        }
    }

    #[test]
    fn grand_star_exit_under_enmity() {
        let g = fixtures::star_with_stranger_leaves();
        let b = OracleBudget::default();
        assert!(
            !oracle_stable(&g, &Partition::grand(3), Notion::Ns, &all_enemies(&g), &b).unwrap()
        );
        assert!(oracle_stable(&g, &Partition::grand(3), Notion::Ns, &all_friends(&g), &b).unwrap());
    }

    #[test]
    fn mutual_strangers_never_necessarily_cis() {
        let b = OracleBudget::default();
        let q = StabilityQuery::new(Notion::Cis, Mode::Necessary);
        for o in [Orientation::FriendOriented, Orientation::EnemyOriented] {
            let g = fixtures::mutual_strangers_pair(o);
            for p in enumerate_partitions(2, &b).unwrap() {
                assert!(!oracle_mode(&g, &p, q, ResolutionMode::Joint, &b).unwrap());
            }
            assert_eq!(
                oracle_exists(&g, q, ResolutionMode::Joint, &b).unwrap(),
                None
            );
        }
    }

    #[test]
    fn bridge_partition_is_necessarily_cis() {
        let b = OracleBudget::default();
        let q = StabilityQuery::new(Notion::Cis, Mode::Necessary);
        for o in [Orientation::FriendOriented, Orientation::EnemyOriented] {
            let g = fixtures::two_pairs_with_bridge(o);
            let p = part(5, &[&[0, 1], &[2], &[3, 4]]);
            assert!(oracle_mode(&g, &p, q, ResolutionMode::Joint, &b).unwrap());
        }
    }

    #[test]
    fn resolution_counts() {
        let b = OracleBudget::default();
        let g = fixtures::star_with_stranger_leaves();
        assert_eq!(
            oracle_resolutions(&g, ResolutionMode::Joint, &b)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            oracle_resolutions(&g, ResolutionMode::Independent, &b)
                .unwrap()
                .len(),
            4
        );
        let tight = OracleBudget {
            max_resolution_bits: 1,
            ..b
        };
        assert!(oracle_resolutions(&g, ResolutionMode::Independent, &tight).is_err());
    }

    #[test]
    fn stranger_free_games_have_one_resolution() {
        let g = GameBuilder::new(Orientation::FriendOriented, 3)
            .with_mutual(0, 1, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        let b = OracleBudget::default();
        let only = oracle_resolutions(&g, ResolutionMode::Joint, &b).unwrap();
        assert_eq!(only.len(), 1);
        for p in enumerate_partitions(3, &b).unwrap() {
            for notion in Notion::ALL {
                let fixed = oracle_stable(&g, &p, notion, &only[0], &b).unwrap();
                for mode in Mode::ALL {
                    let q = StabilityQuery::new(notion, mode);
                    assert_eq!(
                        oracle_mode(&g, &p, q, ResolutionMode::Joint, &b).unwrap(),
                        fixed
                    );
                }
            }
        }
    }

    #[test]
    fn step_limit_refuses_early() {
        let g = fixtures::two_pairs_with_bridge(Orientation::FriendOriented);
        let b = OracleBudget {
            step_limit: 10,
            ..OracleBudget::default()
        };
        let q = StabilityQuery::new(Notion::Cs, Mode::Necessary);
        assert!(matches!(
            oracle_mode(&g, &Partition::grand(5), q, ResolutionMode::Joint, &b),
            Err(Error::StepLimit { .. })
        ));
    }

    proptest! {
        #[test]
        fn per_resolution_implications(game in fixtures::arb_game_limited(5, 4), labels in proptest::collection::vec(0usize..3, 5)) {
            let n = game.agent_count();
            let p = Partition::from_labels(&labels[..n]);
            let b = OracleBudget::default();
            for r in oracle_resolutions(&game, ResolutionMode::Independent, &b).unwrap() {
                let s = |notion| oracle_stable(&game, &p, notion, &r, &b).unwrap();
                prop_assert!(!s(Notion::Ns) || s(Notion::Is));
                prop_assert!(!s(Notion::Is) || s(Notion::Cis));
                prop_assert!(!s(Notion::Scs) || s(Notion::Cs));
                prop_assert!(!s(Notion::Ns) || s(Notion::Ir));
                prop_assert!(!s(Notion::Is) || s(Notion::Ir));
            }
        }

        #[test]
        fn necessary_implies_possible(game in fixtures::arb_game_limited(4, 5), labels in proptest::collection::vec(0usize..3, 4)) {
            let n = game.agent_count();
            let p = Partition::from_labels(&labels[..n]);
            let b = OracleBudget::default();
            for notion in Notion::ALL {
                let nec = oracle_mode(&game, &p, StabilityQuery::new(notion, Mode::Necessary), ResolutionMode::Joint, &b).unwrap();
                let pos = oracle_mode(&game, &p, StabilityQuery::new(notion, Mode::Possible), ResolutionMode::Joint, &b).unwrap();
                prop_assert!(!nec || pos);
            }
        }
    }
}
