//! Existence of possibly and necessarily stable partitions.
//!
//! Where a stable partition is guaranteed, it is constructed directly:
//!
//! - singletons are necessarily individually rational;
//! - strongly connected components of the known-friendship graph (friend
//!   oriented) and greedy cliques of mutual known friends (enemy oriented)
//!   are necessarily internally stable;
//! - under the all-enemies resolution a friend-oriented game has a strictly
//!   core stable partition (its friendship components) and an enemy-oriented
//!   game a core stable one (greedy maximum cliques), which makes them
//!   possibly stable;
//! - symmetric games reach a Nash stable partition by improvement dynamics;
//! - necessary CIS is decided exactly on symmetric games, and the grand
//!   coalition is necessarily CIS whenever everybody is somebody's known
//!   friend.
//!
//! Everything else falls back to enumerating partitions.

mod canon;
mod search;

pub use canon::{canonical_games, canonical_key, GameFamily, StrangerPairs};
pub use search::{
    search_no_ncs_counterexample, Counterexample, SearchConstraints, SearchOptions, SearchPreset,
    SearchReport,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{bit, low_mask, Game, Members, Orientation, Partition};
use crate::oracle::{enumerate_partitions, OracleBudget};
use crate::verify::{verify, Mode, Notion, StabilityQuery, VerifyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Exists,
    DoesNotExist,
    /// The brute-force fallback would exceed its cap.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Singletons,
    FriendshipComponents,
    GreedyMaximumCliques,
    ImprovementDynamics,
    InternalStabilityConstruction,
    SymmetricCisCondition,
    GrandCoalition,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Singletons => "singleton partition",
            Method::FriendshipComponents => "strongly connected friendship components",
            Method::GreedyMaximumCliques => "greedy maximum cliques",
            Method::ImprovementDynamics => "Nash improvement dynamics",
            Method::InternalStabilityConstruction => "internal stability construction",
            Method::SymmetricCisCondition => "symmetric CIS condition",
            Method::GrandCoalition => "grand coalition",
            Method::BruteForce => "brute force",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistenceAnswer {
    pub answer: Answer,
    /// A stable partition, present whenever `answer` is `Exists`.
    pub certificate: Option<Partition>,
    pub method: Method,
}

impl ExistenceAnswer {
    fn found(certificate: Partition, method: Method) -> Self {
        ExistenceAnswer {
            answer: Answer::Exists,
            certificate: Some(certificate),
            method,
        }
    }

    fn none(method: Method) -> Self {
        ExistenceAnswer {
            answer: Answer::DoesNotExist,
            certificate: None,
            method,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExistOptions {
    /// Largest agent count for which partitions are enumerated.
    pub partition_cap: usize,
    pub verify: VerifyOptions,
}

impl Default for ExistOptions {
    fn default() -> Self {
        ExistOptions {
            partition_cap: 10,
            verify: VerifyOptions::default(),
        }
    }
}

fn stable(
    game: &Game,
    p: &Partition,
    notion: Notion,
    mode: Mode,
    opts: &ExistOptions,
) -> Result<bool> {
    Ok(verify(game, p, StabilityQuery::new(notion, mode), &opts.verify)?.is_stable())
}

fn brute_force(
    game: &Game,
    notion: Notion,
    mode: Mode,
    opts: &ExistOptions,
) -> Result<ExistenceAnswer> {
    let n = game.agent_count();
    if n > opts.partition_cap {
        return Ok(ExistenceAnswer {
            answer: Answer::Unknown,
            certificate: None,
            method: Method::BruteForce,
        });
    }
    let budget = OracleBudget {
        max_agents: opts.partition_cap,
        ..OracleBudget::default()
    };
    for p in enumerate_partitions(n, &budget)? {
        if stable(game, &p, notion, mode, opts)? {
            return Ok(ExistenceAnswer::found(p, Method::BruteForce));
        }
    }
    Ok(ExistenceAnswer::none(Method::BruteForce))
}

/// Is there a partition that is `notion`-stable under some resolution?
pub fn exists_possible(
    game: &Game,
    notion: Notion,
    opts: &ExistOptions,
) -> Result<ExistenceAnswer> {
    let shortcut = match (notion, game.orientation()) {
        (Notion::Ir, _) => Some((
            Partition::singletons(game.agent_count()),
            Method::Singletons,
        )),
        (Notion::Ins, _) => Some((construct_n_ins(game), Method::InternalStabilityConstruction)),
        (Notion::Cs | Notion::Scs, Orientation::FriendOriented) => {
            Some((friendship_components(game), Method::FriendshipComponents))
        }
        (Notion::Cs, Orientation::EnemyOriented) => {
            Some((greedy_maximum_cliques(game), Method::GreedyMaximumCliques))
        }
        (Notion::Ns | Notion::Is | Notion::Cis, _) if game.is_symmetric() => {
            Some((improvement_dynamics(game), Method::ImprovementDynamics))
        }
        _ => None,
    };
    if let Some((p, method)) = shortcut {
        let ok = stable(game, &p, notion, Mode::Possible, opts)?;
        debug_assert!(ok, "{method} certificate {p} is not P-{notion}");
        if ok {
            return Ok(ExistenceAnswer::found(p, method));
        }
    }
    brute_force(game, notion, Mode::Possible, opts)
}

/// Is there a partition that is `notion`-stable under every resolution?
pub fn exists_necessary(
    game: &Game,
    notion: Notion,
    opts: &ExistOptions,
) -> Result<ExistenceAnswer> {
    let n = game.agent_count();
    match notion {
        Notion::Ir => {
            return Ok(ExistenceAnswer::found(
                Partition::singletons(n),
                Method::Singletons,
            ))
        }
        Notion::Ins => {
            return Ok(ExistenceAnswer::found(
                construct_n_ins(game),
                Method::InternalStabilityConstruction,
            ))
        }
        Notion::Cis if game.is_symmetric() => {
            if !check_ncis_symmetric_condition(game)? {
                return Ok(ExistenceAnswer::none(Method::SymmetricCisCondition));
            }
            let components = friendship_components(game);
            let p = if stable(game, &components, notion, Mode::Necessary, opts)? {
                components
            } else {
                merged_friended_agents(game)
            };
            debug_assert!(stable(game, &p, notion, Mode::Necessary, opts)?);
            return Ok(ExistenceAnswer::found(p, Method::SymmetricCisCondition));
        }
        Notion::Cis if grand_coalition_ncis(game) => {
            return Ok(ExistenceAnswer::found(
                Partition::grand(n),
                Method::GrandCoalition,
            ))
        }
        _ => {}
    }
    brute_force(game, notion, Mode::Necessary, opts)
}

/// Exact test for the existence of a necessarily CIS partition in a
/// symmetric game: every agent without known friends must have only
/// befriended strangers, and if it has strangers at all it must be the enemy
/// of some befriended agent.
pub fn check_ncis_symmetric_condition(game: &Game) -> Result<bool> {
    if !game.is_symmetric() {
        return Err(Error::AsymmetricGame);
    }
    let n = game.agent_count();
    let friended: u64 = (0..n)
        .filter(|&k| game.friend_mask(k) != 0)
        .fold(0, |m, k| m | bit(k));
    Ok((0..n).filter(|&i| friended & bit(i) == 0).all(|i| {
        let strangers = game.stranger_mask(i);
        let strangers_friended = strangers & !friended == 0;
        let shunned = strangers == 0 || Members(friended).any(|k| game.enemy_mask(k) & bit(i) != 0);
        strangers_friended && shunned
    }))
}

/// True iff every agent is somebody's known friend, in which case nobody
/// can ever get permission to leave the grand coalition.
pub fn grand_coalition_ncis(game: &Game) -> bool {
    let n = game.agent_count();
    let befriended = (0..n).fold(0, |m, i| m | game.friend_mask(i));
    n > 1 && befriended == low_mask(n)
}

/// A necessarily internally stable partition. Friend-oriented games get the
/// strongly connected components of the known-friendship graph,
/// enemy-oriented games greedy maximal cliques of mutual known friends taken
/// in agent order.
pub fn construct_n_ins(game: &Game) -> Partition {
    match game.orientation() {
        Orientation::FriendOriented => friendship_components(game),
        Orientation::EnemyOriented => greedy_maximal_cliques(game),
    }
}

fn partition_from_masks(n: usize, masks: impl IntoIterator<Item = u64>) -> Partition {
    let mut labels = vec![0; n];
    for (label, mask) in masks.into_iter().enumerate() {
        for i in Members(mask) {
            labels[i] = label;
        }
    }
    Partition::from_labels(&labels)
}

/// Strongly connected components of the directed known-friendship graph.
fn friendship_components(game: &Game) -> Partition {
    let n = game.agent_count();
    let reach: Vec<u64> = (0..n)
        .map(|i| {
            let mut seen = bit(i);
            let mut frontier = bit(i);
            while frontier != 0 {
                let next = Members(frontier).fold(0, |m, j| m | game.friend_mask(j)) & !seen;
                seen |= next;
                frontier = next;
            }
            seen
        })
        .collect();
    let mut left = low_mask(n);
    let mut components = Vec::new();
    while left != 0 {
        let i = left.trailing_zeros() as usize;
        let component = Members(reach[i])
            .filter(|&j| reach[j] & bit(i) != 0)
            .fold(0, |m, j| m | bit(j));
        components.push(component);
        left &= !component;
    }
    partition_from_masks(n, components)
}

/// Agents adjacent to `i` in the mutual known-friendship graph.
fn mutual_friends(game: &Game, i: usize) -> u64 {
    Members(game.friend_mask(i))
        .filter(|&j| game.friend_mask(j) & bit(i) != 0)
        .fold(0, |m, j| m | bit(j))
}

fn greedy_maximal_cliques(game: &Game) -> Partition {
    let n = game.agent_count();
    let adj: Vec<u64> = (0..n).map(|i| mutual_friends(game, i)).collect();
    let mut left = low_mask(n);
    let mut cliques = Vec::new();
    while left != 0 {
        let i = left.trailing_zeros() as usize;
        let mut clique = bit(i);
        let mut candidates = adj[i] & left;
        while candidates != 0 {
            let j = candidates.trailing_zeros() as usize;
            clique |= bit(j);
            candidates &= adj[j] & !bit(j);
        }
        cliques.push(clique);
        left &= !clique;
    }
    partition_from_masks(n, cliques)
}

/// Repeatedly removes a maximum clique of mutual known friends, preferring
/// the lexicographically smallest among equally large ones.
fn greedy_maximum_cliques(game: &Game) -> Partition {
    let n = game.agent_count();
    let adj: Vec<u64> = (0..n).map(|i| mutual_friends(game, i)).collect();
    let mut left = low_mask(n);
    let mut cliques = Vec::new();
    while left != 0 {
        let mut best = 0u64;
        extend_clique(&adj, 0, left, &mut best);
        cliques.push(best);
        left &= !best;
    }
    partition_from_masks(n, cliques)
}

/// Branch and bound over cliques containing `clique` and drawn from
/// `candidates`, visiting smaller agents first.
fn extend_clique(adj: &[u64], clique: u64, candidates: u64, best: &mut u64) {
    if candidates == 0 {
        if clique.count_ones() > best.count_ones()
            || (clique.count_ones() == best.count_ones() && lex_less(clique, *best))
        {
            *best = clique;
        }
        return;
    }
    if clique.count_ones() + candidates.count_ones() < best.count_ones() {
        return;
    }
    let mut rest = candidates;
    while rest != 0 {
        if clique.count_ones() + rest.count_ones() < best.count_ones() {
            return;
        }
        let j = rest.trailing_zeros() as usize;
        rest &= !bit(j);
        extend_clique(adj, clique | bit(j), rest & adj[j], best);
    }
    if clique.count_ones() > best.count_ones() {
        *best = clique;
    }
}

/// Lexicographic comparison of the sorted member lists of two equal-size sets.
fn lex_less(a: u64, b: u64) -> bool {
    if b == 0 {
        return true;
    }
    let diff = a ^ b;
    diff != 0 && a & (diff & diff.wrapping_neg()) != 0
}

/// Agents with a known friend in one coalition, everybody else alone.
fn merged_friended_agents(game: &Game) -> Partition {
    let n = game.agent_count();
    let friended: u64 = (0..n)
        .filter(|&k| game.friend_mask(k) != 0)
        .fold(0, |m, k| m | bit(k));
    let singles = Members(low_mask(n) & !friended).map(bit);
    partition_from_masks(
        n,
        std::iter::once(friended).filter(|&m| m != 0).chain(singles),
    )
}

/// Nash improvement dynamics with all strangers treated as enemies. Values
/// are symmetric, so the sum of in-coalition values rises with every move
/// and the process stops.
fn improvement_dynamics(game: &Game) -> Partition {
    let n = game.agent_count();
    let mut labels: Vec<usize> = (0..n).collect();
    let mask_of = |labels: &[usize], l: usize| {
        (0..n)
            .filter(|&j| labels[j] == l)
            .fold(0u64, |m, j| m | bit(j))
    };
    loop {
        let mut moved = false;
        for i in 0..n {
            let home = mask_of(&labels, labels[i]);
            let now = game.pessimistic_value(i, home);
            let mut best = (now, labels[i]);
            for l in 0..n {
                let target = mask_of(&labels, l) & !bit(i);
                if l == labels[i] || (target == 0 && home == bit(i)) {
                    continue;
                }
                let v = game.pessimistic_value(i, target);
                if v > best.0 {
                    best = (v, l);
                }
            }
            if best.1 != labels[i] {
                labels[i] = best.1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Partition::from_labels(&labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{AgentId, Coalition, GameBuilder, RelationKind};
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

    fn opts() -> ExistOptions {
        ExistOptions::default()
    }

    /// The condition exactly as sketched in the literature, kept to document
    /// where it goes wrong.
    fn sketched_condition(game: &Game) -> bool {
        let n = game.agent_count();
        (0..n).all(|i| {
            game.friend_mask(i) != 0
                || (Members(game.stranger_mask(i)).all(|j| game.friend_mask(j) != 0)
                    && (0..n).any(|k| game.friend_mask(k) != 0 && game.enemy_mask(k) & bit(i) != 0))
        })
    }

    #[test]
    fn mutual_strangers_have_no_n_cis_but_a_p_cis() {
        for o in [Orientation::FriendOriented, Orientation::EnemyOriented] {
            let g = fixtures::mutual_strangers_pair(o);
            let nec = exists_necessary(&g, Notion::Cis, &opts()).unwrap();
            assert_eq!(nec.answer, Answer::DoesNotExist);
            assert_eq!(nec.method, Method::SymmetricCisCondition);
            assert_eq!(
                exists_possible(&g, Notion::Cis, &opts()).unwrap().answer,
                Answer::Exists
            );
            assert!(!check_ncis_symmetric_condition(&g).unwrap());
            assert!(!grand_coalition_ncis(&g));
        }
    }

    #[test]
    fn star_has_no_n_is_or_n_ns() {
        let g = fixtures::star_with_stranger_leaves();
        for notion in [Notion::Is, Notion::Ns] {
            let a = exists_necessary(&g, notion, &opts()).unwrap();
            assert_eq!(
                (a.answer, a.method),
                (Answer::DoesNotExist, Method::BruteForce)
            );
        }
    }

    #[test]
    fn star_core_via_cliques() {
        let g = fixtures::star_with_stranger_leaves();
        let a = exists_possible(&g, Notion::Cs, &opts()).unwrap();
        assert_eq!(a.method, Method::GreedyMaximumCliques);
        assert_eq!(a.certificate, Some(part(3, &[&[0, 1], &[2]])));
    }

    #[test]
    fn bridge_game_certificates() {
        let g = fixtures::two_pairs_with_bridge(Orientation::FriendOriented);
        let expected = part(5, &[&[0, 1], &[2], &[3, 4]]);
        let scs = exists_possible(&g, Notion::Scs, &opts()).unwrap();
        assert_eq!(
            (scs.method, scs.certificate.as_ref()),
            (Method::FriendshipComponents, Some(&expected))
        );
        let cis = exists_necessary(&g, Notion::Cis, &opts()).unwrap();
        assert_eq!(cis.certificate, Some(expected.clone()));
        assert_eq!(construct_n_ins(&g), expected);
        assert!(check_ncis_symmetric_condition(&g).unwrap());
        assert!(!grand_coalition_ncis(&g));
    }

    #[test]
    fn mutual_strangers_have_p_ns() {
        let g = fixtures::mutual_strangers_pair(Orientation::FriendOriented);
        let a = exists_possible(&g, Notion::Ns, &opts()).unwrap();
        assert_eq!(a.answer, Answer::Exists);
    }

    #[test]
    fn star_cliques_for_internal_stability() {
        let g = fixtures::star_with_stranger_leaves();
        assert_eq!(construct_n_ins(&g), part(3, &[&[0, 1], &[2]]));
    }

    #[test]
    fn all_strangers_enemy_oriented_gets_singletons() {
        let g = GameBuilder::new(Orientation::EnemyOriented, 4)
            .symmetric(true)
            .fill_unset(RelationKind::Stranger)
            .build()
            .unwrap();
        let p = construct_n_ins(&g);
        assert_eq!(p, Partition::singletons(4));
        let v = verify(
            &g,
            &p,
            StabilityQuery::new(Notion::Ins, Mode::Necessary),
            &VerifyOptions::default(),
        )
        .unwrap();
        assert!(v.is_stable());
    }

    #[test]
    fn friend_path_has_grand_n_cis() {
        let g = GameBuilder::new(Orientation::FriendOriented, 3)
            .symmetric(true)
            .with_mutual(0, 1, RelationKind::Friend)
            .with_mutual(1, 2, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert!(grand_coalition_ncis(&g));
        let v = verify(
            &g,
            &Partition::grand(3),
            StabilityQuery::new(Notion::Cis, Mode::Necessary),
            &VerifyOptions::default(),
        );
        assert!(v.unwrap().is_stable());
    }

    #[test]
    fn sketched_condition_misses_stranger_free_enemies() {
        let g = GameBuilder::new(Orientation::FriendOriented, 2)
            .symmetric(true)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert!(!sketched_condition(&g));
        assert!(check_ncis_symmetric_condition(&g).unwrap());
        let a = exists_necessary(&g, Notion::Cis, &opts()).unwrap();
        assert_eq!(a.certificate, Some(Partition::singletons(2)));
    }

    #[test]
    fn asymmetric_games_are_rejected_by_the_symmetric_condition() {
        let g = GameBuilder::new(Orientation::FriendOriented, 2)
            .with(0, 1, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert_eq!(
            check_ncis_symmetric_condition(&g),
            Err(Error::AsymmetricGame)
        );
    }

    #[test]
    fn maximum_clique_prefers_larger_then_earlier() {
        let g = GameBuilder::new(Orientation::EnemyOriented, 5)
            .symmetric(true)
            .with_mutual(0, 1, RelationKind::Friend)
            .with_mutual(2, 3, RelationKind::Friend)
            .with_mutual(2, 4, RelationKind::Friend)
            .with_mutual(3, 4, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert_eq!(greedy_maximum_cliques(&g), part(5, &[&[0, 1], &[2, 3, 4]]));
        assert_eq!(greedy_maximal_cliques(&g), part(5, &[&[0, 1], &[2, 3, 4]]));
    }

    #[test]
    fn brute_force_respects_the_cap() {
        let g = fixtures::two_pairs_with_bridge(Orientation::EnemyOriented);
        let tight = ExistOptions {
            partition_cap: 4,
            ..opts()
        };
        assert_eq!(
            exists_necessary(&g, Notion::Cs, &tight).unwrap().answer,
            Answer::Unknown
        );
    }

    proptest! {
        #[test]
        fn certificates_verify(game in fixtures::arb_game(6)) {
            for notion in Notion::ALL {
                for (mode, a) in [
                    (Mode::Possible, exists_possible(&game, notion, &opts()).unwrap()),
                    (Mode::Necessary, exists_necessary(&game, notion, &opts()).unwrap()),
                ] {
                    prop_assert_eq!(a.answer == Answer::Exists, a.certificate.is_some());
                    if let Some(p) = &a.certificate {
                        prop_assert!(stable(&game, p, notion, mode, &opts()).unwrap(), "{} {:?}", notion, a.method);
                    }
                }
            }
        }

        #[test]
        fn necessary_existence_implies_possible(game in fixtures::arb_game(5)) {
            for notion in Notion::ALL {
                if exists_necessary(&game, notion, &opts()).unwrap().answer == Answer::Exists {
                    prop_assert_eq!(exists_possible(&game, notion, &opts()).unwrap().answer, Answer::Exists);
                }
            }
        }

        #[test]
        fn shortcuts_agree_with_brute_force(game in fixtures::arb_game(5)) {
            for notion in Notion::ALL {
                for mode in Mode::ALL {
                    let fast = match mode {
                        Mode::Possible => exists_possible(&game, notion, &opts()).unwrap(),
                        Mode::Necessary => exists_necessary(&game, notion, &opts()).unwrap(),
                    };
                    let slow = brute_force(&game, notion, mode, &opts()).unwrap();
                    prop_assert_eq!(fast.answer, slow.answer, "{}-{} via {}", mode, notion, fast.method);
                }
            }
        }

        #[test]
        fn n_ins_construction_verifies(game in fixtures::arb_game(8)) {
            let p = construct_n_ins(&game);
            let v = verify(&game, &p, StabilityQuery::new(Notion::Ins, Mode::Necessary), &VerifyOptions::default()).unwrap();
            prop_assert!(v.is_stable());
        }

        #[test]
        fn grand_coalition_condition_is_sufficient(game in fixtures::arb_game(7)) {
            if grand_coalition_ncis(&game) {
                let v = verify(&game, &Partition::grand(game.agent_count()), StabilityQuery::new(Notion::Cis, Mode::Necessary), &VerifyOptions::default()).unwrap();
                prop_assert!(v.is_stable());
            }
        }
    }
}
