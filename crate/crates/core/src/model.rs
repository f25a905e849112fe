//! Games, coalitions, partitions and utilities.
//!
//! Agents are 0-indexed here and printed 1-indexed. Coalitions are bitsets,
//! which caps a game at [`MAX_AGENTS`] agents.

use std::fmt;

use crate::error::{Error, Result};
use crate::resolution::Resolution;

/// Largest supported agent count.
pub const MAX_AGENTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for AgentId {
    fn from(index: usize) -> Self {
        AgentId(index)
    }
}

/// Printed 1-indexed.
impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Friend,
    Enemy,
    Stranger,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    FriendOriented,
    EnemyOriented,
}

impl Orientation {
    /// Value of a (known or resolved) friend in a game with `n` agents.
    pub fn friend_weight(self, n: usize) -> i64 {
        match self {
            Orientation::FriendOriented => n as i64,
            Orientation::EnemyOriented => 1,
        }
    }

    /// Value of a (known or resolved) enemy in a game with `n` agents.
    pub fn enemy_weight(self, n: usize) -> i64 {
        match self {
            Orientation::FriendOriented => -1,
            Orientation::EnemyOriented => -(n as i64),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::FriendOriented => "friend-oriented",
            Orientation::EnemyOriented => "enemy-oriented",
        })
    }
}

/// A set of agents, stored as a bitset.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_mask(mask: u64) -> Self {
        Coalition(mask)
    }

    pub fn singleton(agent: AgentId) -> Self {
        Coalition(bit(agent.0))
    }

    /// All agents `0..n`.
    pub fn grand(n: usize) -> Self {
        Coalition(low_mask(n))
    }

    pub fn from_agents<I>(agents: I) -> Self
    where
        I: IntoIterator<Item = AgentId>,
    {
        Coalition(agents.into_iter().fold(0, |m, a| m | bit(a.0)))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, agent: AgentId) -> bool {
        agent.0 < MAX_AGENTS && self.0 & bit(agent.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, agent: AgentId) -> Self {
        Coalition(self.0 | bit(agent.0))
    }

    pub fn without(self, agent: AgentId) -> Self {
        Coalition(self.0 & !bit(agent.0))
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Lowest-indexed member.
    pub fn first(self) -> Option<AgentId> {
        (self.0 != 0).then(|| AgentId(self.0.trailing_zeros() as usize))
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = AgentId> {
        Members(self.0).map(AgentId)
    }

    pub(crate) fn indices(self) -> Members {
        Members(self.0)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromIterator<AgentId> for Coalition {
    fn from_iter<T: IntoIterator<Item = AgentId>>(iter: T) -> Self {
        Coalition::from_agents(iter)
    }
}

/// Iterator over set bits of a mask.
#[derive(Clone)]
pub(crate) struct Members(pub(crate) u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Non-empty subsets of `universe`, smallest first and lexicographic within
/// a size.
pub(crate) struct SizeLexSubsets {
    universe: Vec<usize>,
    max_size: usize,
    idx: Vec<usize>,
}

impl SizeLexSubsets {
    pub(crate) fn new(universe: Vec<usize>, max_size: usize) -> Self {
        let max_size = max_size.min(universe.len());
        let idx = if max_size == 0 { Vec::new() } else { vec![0] };
        SizeLexSubsets {
            universe,
            max_size,
            idx,
        }
    }

    pub(crate) fn of_mask(mask: u64, max_size: usize) -> Self {
        Self::new(Members(mask).collect(), max_size)
    }
}

impl Iterator for SizeLexSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let k = self.idx.len();
        if k == 0 || k > self.max_size {
            return None;
        }
        let mask = self.idx.iter().fold(0, |m, &p| m | bit(self.universe[p]));
        let len = self.universe.len();
        match (0..k).rev().find(|&p| self.idx[p] < len - k + p) {
            Some(p) => {
                self.idx[p] += 1;
                for q in p + 1..k {
                    self.idx[q] = self.idx[q - 1] + 1;
                }
            }
            None => self.idx = (0..k + 1).collect(),
        }
        Some(mask)
    }
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    NoAgents,
    TooManyAgents(usize),
    AgentOutOfRange(AgentId, AgentId),
    SelfRelation(AgentId),
    Unclassified(AgentId, AgentId),
    AsymmetricPair(AgentId, AgentId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAgents => write!(f, "game has no agents"),
            Violation::TooManyAgents(n) => {
                write!(
                    f,
                    "{n} agents exceeds the supported maximum of {MAX_AGENTS}"
                )
            }
            Violation::AgentOutOfRange(i, j) => {
                write!(f, "pair ({i},{j}) names an agent out of range")
            }
            Violation::SelfRelation(i) => write!(f, "self-relation on agent {i}"),
            Violation::Unclassified(i, j) => write!(f, "unclassified pair ({i},{j})"),
            Violation::AsymmetricPair(i, j) => write!(f, "asymmetric pair ({i},{j})"),
        }
    }
}

/// Mutable draft of a game; [`GameBuilder::build`] validates it.
#[derive(Clone, Debug)]
pub struct GameBuilder {
    n: usize,
    orientation: Orientation,
    symmetric: bool,
    rel: Vec<Option<RelationKind>>,
    out_of_range: Vec<(usize, usize)>,
}

impl GameBuilder {
    /// A draft with every pair unclassified.
    pub fn new(orientation: Orientation, n: usize) -> Self {
        let cells = n.min(MAX_AGENTS + 1);
        GameBuilder {
            n,
            orientation,
            symmetric: false,
            rel: vec![None; cells * cells],
            out_of_range: Vec::new(),
        }
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn symmetric(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn set_symmetric(&mut self, symmetric: bool) {
        self.symmetric = symmetric;
    }

    /// Classifies the ordered pair `(i, j)`, 0-indexed.
    pub fn set(&mut self, i: usize, j: usize, kind: RelationKind) {
        let cells = self.cells();
        if i >= cells || j >= cells || i >= self.n || j >= self.n {
            self.out_of_range.push((i, j));
            return;
        }
        self.rel[i * cells + j] = Some(kind);
    }

    /// Classifies both `(i, j)` and `(j, i)`.
    pub fn set_mutual(&mut self, i: usize, j: usize, kind: RelationKind) {
        self.set(i, j, kind);
        self.set(j, i, kind);
    }

    pub fn with(mut self, i: usize, j: usize, kind: RelationKind) -> Self {
        self.set(i, j, kind);
        self
    }

    pub fn with_mutual(mut self, i: usize, j: usize, kind: RelationKind) -> Self {
        self.set_mutual(i, j, kind);
        self
    }

    pub fn get(&self, i: usize, j: usize) -> Option<RelationKind> {
        let cells = self.cells();
        if i < cells && j < cells {
            self.rel[i * cells + j]
        } else {
            None
        }
    }

    /// Classifies every still-unclassified pair of distinct agents as `kind`.
    pub fn fill_unset(mut self, kind: RelationKind) -> Self {
        let cells = self.cells();
        for i in 0..cells {
            for j in 0..cells {
                if i != j && self.rel[i * cells + j].is_none() {
                    self.rel[i * cells + j] = Some(kind);
                }
            }
        }
        self
    }

    pub fn build(self) -> Result<Game> {
        validate_game(&self).map_err(Error::InvalidGame)?;
        let n = self.n;
        let mut game = Game {
            n,
            orientation: self.orientation,
            symmetric: self.symmetric,
            rel: vec![RelationKind::Enemy; n * n],
            friends: vec![0; n],
            enemies: vec![0; n],
            strangers: vec![0; n],
        };
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let kind = self.rel[i * n + j].expect("validated");
                game.rel[i * n + j] = kind;
                let slot = match kind {
                    RelationKind::Friend => &mut game.friends[i],
                    RelationKind::Enemy => &mut game.enemies[i],
                    RelationKind::Stranger => &mut game.strangers[i],
                };
                *slot |= bit(j);
            }
        }
        Ok(game)
    }

    fn cells(&self) -> usize {
        self.n.min(MAX_AGENTS + 1)
    }
}

/// Checks every game invariant, returning all violations found.
pub fn validate_game(draft: &GameBuilder) -> std::result::Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if draft.n == 0 {
        violations.push(Violation::NoAgents);
    }
    if draft.n > MAX_AGENTS {
        violations.push(Violation::TooManyAgents(draft.n));
        return Err(violations);
    }
    for &(i, j) in &draft.out_of_range {
        violations.push(Violation::AgentOutOfRange(AgentId(i), AgentId(j)));
    }
    let n = draft.n;
    for i in 0..n {
        if draft.get(i, i).is_some() {
            violations.push(Violation::SelfRelation(AgentId(i)));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let here = draft.get(i, j);
            if here.is_none() {
                violations.push(Violation::Unclassified(AgentId(i), AgentId(j)));
            } else if draft.symmetric && i < j {
                let there = draft.get(j, i);
                if there.is_some() && there != here {
                    violations.push(Violation::AsymmetricPair(AgentId(i), AgentId(j)));
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// A validated game. Immutable; relation sets are cached per agent as bitsets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Game {
    n: usize,
    orientation: Orientation,
    symmetric: bool,
    rel: Vec<RelationKind>,
    friends: Vec<u64>,
    enemies: Vec<u64>,
    strangers: Vec<u64>,
}

impl Game {
    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The declared symmetry flag; validation guarantees it is truthful.
    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    /// True iff `rel(i, j) = rel(j, i)` for all distinct agents.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.rel[i * self.n + j] == self.rel[j * self.n + i]))
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n).map(AgentId)
    }

    pub fn grand_coalition(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    /// How `i` classifies `j`. Panics when `i == j` or either is out of range.
    pub fn relation(&self, i: AgentId, j: AgentId) -> RelationKind {
        assert!(i != j, "agents have no relation to themselves");
        assert!(i.0 < self.n && j.0 < self.n, "agent out of range");
        self.rel[i.0 * self.n + j.0]
    }

    /// `F_i`: agents `i` knows as friends.
    pub fn friends_of(&self, i: AgentId) -> Coalition {
        Coalition(self.friends[i.0])
    }

    /// `E_i`: agents `i` knows as enemies.
    pub fn enemies_of(&self, i: AgentId) -> Coalition {
        Coalition(self.enemies[i.0])
    }

    /// `S_i`: agents who are strangers to `i`.
    pub fn strangers_of(&self, i: AgentId) -> Coalition {
        Coalition(self.strangers[i.0])
    }

    /// Ordered stranger pairs `(i, j)` in lexicographic order.
    pub fn stranger_pairs(&self) -> Vec<(AgentId, AgentId)> {
        (0..self.n)
            .flat_map(|i| Members(self.strangers[i]).map(move |j| (AgentId(i), AgentId(j))))
            .collect()
    }

    /// A draft carrying this game's relations, for deriving modified games.
    pub fn to_builder(&self) -> GameBuilder {
        let mut draft = GameBuilder::new(self.orientation, self.n).symmetric(self.symmetric);
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    draft.set(i, j, self.rel[i * self.n + j]);
                }
            }
        }
        draft
    }

    pub fn has_strangers(&self) -> bool {
        self.strangers.iter().any(|&s| s != 0)
    }

    pub(crate) fn friend_mask(&self, i: usize) -> u64 {
        self.friends[i]
    }

    pub(crate) fn enemy_mask(&self, i: usize) -> u64 {
        self.enemies[i]
    }

    pub(crate) fn stranger_mask(&self, i: usize) -> u64 {
        self.strangers[i]
    }

    /// Value `i` assigns to `others` (minus itself) when exactly the agents in
    /// `friendly` count as friends and all remaining ones as enemies.
    #[inline]
    pub(crate) fn value_with(&self, i: usize, others: u64, friendly: u64) -> i64 {
        let others = others & !bit(i);
        let friends = (others & friendly).count_ones() as i64;
        let enemies = (others & !friendly).count_ones() as i64;
        friends * self.orientation.friend_weight(self.n)
            + enemies * self.orientation.enemy_weight(self.n)
    }

    /// Value of `others` to `i` when all of `i`'s strangers are friends (`r⁺`).
    #[inline]
    pub(crate) fn optimistic_value(&self, i: usize, others: u64) -> i64 {
        self.value_with(i, others, self.friends[i] | self.strangers[i])
    }

    /// Value of `others` to `i` when all of `i`'s strangers are enemies (`r⁻`).
    #[inline]
    pub(crate) fn pessimistic_value(&self, i: usize, others: u64) -> i64 {
        self.value_with(i, others, self.friends[i])
    }

    /// Value of `others` to `i` under a concrete resolution.
    #[inline]
    pub(crate) fn resolved_value(&self, res: &Resolution, i: usize, others: u64) -> i64 {
        self.value_with(i, others, self.friends[i] | res.friendly_mask(i))
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent.0 < self.n {
            Ok(())
        } else {
            Err(Error::AgentOutOfRange { agent, n: self.n })
        }
    }

    pub(crate) fn check_coalition(&self, coalition: Coalition) -> Result<()> {
        if coalition.is_subset(self.grand_coalition()) {
            Ok(())
        } else {
            Err(Error::InvalidPartition(format!(
                "coalition {coalition} is not a subset of the {} agents",
                self.n
            )))
        }
    }
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Game({}, n={}", self.orientation, self.n)?;
        if self.symmetric {
            write!(f, ", symmetric")?;
        }
        for i in 0..self.n {
            for j in Members(self.friends[i]) {
                write!(f, ", {}F{}", i + 1, j + 1)?;
            }
            for j in Members(self.strangers[i]) {
                write!(f, ", {}S{}", i + 1, j + 1)?;
            }
        }
        write!(f, ")")
    }
}

/// `u_i^r(C)`: the utility `agent` derives from `coalition` under `resolution`.
///
/// Friend-oriented games weigh friends `n` and enemies `-1`; enemy-oriented
/// games weigh friends `1` and enemies `-n`. Strangers count according to how
/// `resolution` resolves them, and the agent itself contributes nothing.
pub fn utility(
    game: &Game,
    resolution: &Resolution,
    agent: AgentId,
    coalition: Coalition,
) -> Result<i64> {
    game.check_agent(agent)?;
    if !coalition.contains(agent) {
        return Err(Error::AgentNotInCoalition { agent, coalition });
    }
    game.check_coalition(coalition)?;
    if !resolution.covers(game) {
        return Err(Error::IncompleteResolution);
    }
    Ok(game.resolved_value(resolution, agent.0, coalition.mask()))
}

/// Disjoint non-empty coalitions covering every agent, in canonical order
/// (sorted by lowest member).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    coalitions: Vec<Coalition>,
}

impl Partition {
    pub fn from_coalitions<I>(n: usize, coalitions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Coalition>,
    {
        if n > MAX_AGENTS {
            return Err(Error::InvalidPartition(format!("{n} agents is too many")));
        }
        let mut seen = 0u64;
        let mut list = Vec::new();
        for c in coalitions {
            if c.is_empty() {
                return Err(Error::InvalidPartition("empty coalition".into()));
            }
            if !c.is_subset(Coalition::grand(n)) {
                return Err(Error::InvalidPartition(format!(
                    "coalition {c} names an agent outside 1..={n}"
                )));
            }
            if seen & c.mask() != 0 {
                let dup = Coalition(seen & c.mask()).first().expect("non-empty");
                return Err(Error::InvalidPartition(format!(
                    "agent {dup} appears twice"
                )));
            }
            seen |= c.mask();
            list.push(c);
        }
        if seen != low_mask(n) {
            let missing = Coalition(low_mask(n) & !seen).first().expect("non-empty");
            return Err(Error::InvalidPartition(format!(
                "agent {missing} is not covered"
            )));
        }
        Ok(Self::canonical(n, list))
    }

    /// Builds a partition from per-agent labels; agents sharing a label share
    /// a coalition.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: Vec<(usize, u64)> = Vec::new();
        for (agent, &label) in labels.iter().enumerate() {
            match groups.iter_mut().find(|(l, _)| *l == label) {
                Some((_, m)) => *m |= bit(agent),
                None => groups.push((label, bit(agent))),
            }
        }
        Self::canonical(
            labels.len(),
            groups.into_iter().map(|(_, m)| Coalition(m)).collect(),
        )
    }

    pub fn singletons(n: usize) -> Self {
        Self::canonical(n, (0..n).map(|i| Coalition(bit(i))).collect())
    }

    pub fn grand(n: usize) -> Self {
        Self::canonical(n, vec![Coalition::grand(n)])
    }

    fn canonical(n: usize, mut coalitions: Vec<Coalition>) -> Self {
        coalitions.sort_by_key(|c| c.mask().trailing_zeros());
        let mut assignment = vec![0; n];
        for (k, c) in coalitions.iter().enumerate() {
            for i in c.indices() {
                assignment[i] = k;
            }
        }
        Partition {
            assignment,
            coalitions,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn coalitions(&self) -> &[Coalition] {
        &self.coalitions
    }

    pub fn len(&self) -> usize {
        self.coalitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coalitions.is_empty()
    }

    /// `γ(i)`.
    pub fn coalition_of(&self, agent: AgentId) -> Coalition {
        self.coalitions[self.assignment[agent.0]]
    }

    pub fn coalition_index(&self, agent: AgentId) -> usize {
        self.assignment[agent.0]
    }

    pub fn contains_coalition(&self, coalition: Coalition) -> bool {
        self.coalitions.contains(&coalition)
    }

    pub fn same_coalition(&self, a: AgentId, b: AgentId) -> bool {
        self.assignment[a.0] == self.assignment[b.0]
    }

    pub(crate) fn mask_of(&self, i: usize) -> u64 {
        self.coalitions[self.assignment[i]].mask()
    }

    pub(crate) fn check_against(&self, game: &Game) -> Result<()> {
        if self.agent_count() == game.agent_count() {
            Ok(())
        } else {
            Err(Error::InvalidPartition(format!(
                "partition covers {} agents but the game has {}",
                self.agent_count(),
                game.agent_count()
            )))
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coalitions.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::resolution::{all_enemies, all_friends, Outcome};
    use proptest::prelude::*;

    fn c(agents: &[usize]) -> Coalition {
        agents.iter().map(|&a| AgentId(a)).collect()
    }

    #[test]
    fn well_formed_symmetric_game_validates() {
        let draft = GameBuilder::new(Orientation::FriendOriented, 3)
            .symmetric(true)
            .with_mutual(0, 1, RelationKind::Friend)
            .with_mutual(1, 2, RelationKind::Stranger)
            .fill_unset(RelationKind::Enemy);
        assert_eq!(validate_game(&draft), Ok(()));
    }

    #[test]
    fn asymmetric_pair_under_symmetric_flag() {
        let draft = GameBuilder::new(Orientation::FriendOriented, 3)
            .symmetric(true)
            .with(0, 1, RelationKind::Friend)
            .with(1, 0, RelationKind::Enemy)
            .fill_unset(RelationKind::Enemy);
        let violations = validate_game(&draft).unwrap_err();
        assert_eq!(
            violations,
            vec![Violation::AsymmetricPair(AgentId(0), AgentId(1))]
        );
        assert_eq!(violations[0].to_string(), "asymmetric pair (1,2)");
    }

    #[test]
    fn missing_pair_is_reported() {
        let mut draft = GameBuilder::new(Orientation::EnemyOriented, 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j && (i, j) != (0, 2) {
                    draft.set(i, j, RelationKind::Enemy);
                }
            }
        }
        let violations = validate_game(&draft).unwrap_err();
        assert_eq!(
            violations,
            vec![Violation::Unclassified(AgentId(0), AgentId(2))]
        );
        assert!(violations[0].to_string().contains("unclassified pair"));
    }

    #[test]
    fn self_relation_and_range_are_reported() {
        let draft = GameBuilder::new(Orientation::EnemyOriented, 2)
            .with(0, 0, RelationKind::Friend)
            .with(0, 2, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy);
        let violations = validate_game(&draft).unwrap_err();
        assert!(violations.contains(&Violation::SelfRelation(AgentId(0))));
        assert!(violations.contains(&Violation::AgentOutOfRange(AgentId(0), AgentId(2))));
        assert!(GameBuilder::new(Orientation::EnemyOriented, 0)
            .build()
            .is_err());
    }

    #[test]
    fn symmetry_detection() {
        assert!(fixtures::star_with_stranger_leaves().is_symmetric());
        let one_way = GameBuilder::new(Orientation::FriendOriented, 2)
            .with(0, 1, RelationKind::Friend)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert!(!one_way.is_symmetric());
        let enemies = GameBuilder::new(Orientation::FriendOriented, 4)
            .fill_unset(RelationKind::Enemy)
            .build()
            .unwrap();
        assert!(enemies.is_symmetric());
    }

    #[test]
    fn star_utilities() {
        let g = fixtures::star_with_stranger_leaves();
        for res in [all_friends(&g), all_enemies(&g)] {
            assert_eq!(
                utility(&g, &res, AgentId(0), g.grand_coalition()).unwrap(),
                2
            );
        }
        let pair = c(&[1, 2]);
        assert_eq!(utility(&g, &all_friends(&g), AgentId(1), pair).unwrap(), 1);
        assert_eq!(utility(&g, &all_enemies(&g), AgentId(1), pair).unwrap(), -3);
        // Grand coalition under enmity: one friend, one resolved enemy.
        assert_eq!(
            utility(&g, &all_enemies(&g), AgentId(1), g.grand_coalition()).unwrap(),
            -2
        );
    }

    #[test]
    fn bridge_game_stranger_only_coalition() {
        let g = fixtures::two_pairs_with_bridge(Orientation::FriendOriented);
        let u = utility(&g, &all_enemies(&g), AgentId(2), c(&[1, 2, 3])).unwrap();
        assert_eq!(u, -2);
    }

    #[test]
    fn singleton_utility_is_zero() {
        let g = fixtures::two_pairs_with_bridge(Orientation::EnemyOriented);
        for i in g.agents() {
            assert_eq!(
                utility(&g, &all_friends(&g), i, Coalition::singleton(i)).unwrap(),
                0
            );
        }
    }

    #[test]
    fn utility_contract_errors() {
        let g = fixtures::star_with_stranger_leaves();
        let r = all_friends(&g);
        assert!(matches!(
            utility(&g, &r, AgentId(0), c(&[1, 2])),
            Err(Error::AgentNotInCoalition { .. })
        ));
        let other = fixtures::mutual_strangers_pair(Orientation::EnemyOriented);
        assert_eq!(
            utility(&g, &all_friends(&other), AgentId(0), c(&[0])),
            Err(Error::IncompleteResolution)
        );
    }

    #[test]
    fn subsets_come_by_size_then_lexicographically() {
        let order: Vec<u64> = SizeLexSubsets::new(vec![0, 1, 2], 3).collect();
        assert_eq!(order, vec![0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111]);
        let capped: Vec<u64> = SizeLexSubsets::of_mask(0b1010, 1).collect();
        assert_eq!(capped, vec![0b0010, 0b1000]);
        assert_eq!(SizeLexSubsets::new(vec![], 3).count(), 0);
        assert_eq!(SizeLexSubsets::new((0..10).collect(), 10).count(), 1023);
    }

    #[test]
    fn partition_validation() {
        let p = Partition::from_coalitions(3, [c(&[2]), c(&[0, 1])]).unwrap();
        assert_eq!(p.to_string(), "{1,2} {3}");
        assert_eq!(p.coalition_of(AgentId(1)), c(&[0, 1]));
        assert!(Partition::from_coalitions(3, [c(&[0, 1]), c(&[1, 2])]).is_err());
        assert!(Partition::from_coalitions(3, [c(&[0, 1])]).is_err());
        assert!(Partition::from_coalitions(3, [c(&[0, 1, 2]), Coalition::EMPTY]).is_err());
        assert!(Partition::from_coalitions(2, [c(&[0, 1, 2])]).is_err());
        assert_eq!(Partition::from_labels(&[5, 5, 1]), p);
    }

    proptest! {
        #[test]
        fn utility_ignores_relations_outside_the_coalition(
            game in fixtures::arb_game(6),
            coalition_bits in 1u64..64,
            i in 0usize..6,
            outsider_edits in proptest::collection::vec((0usize..6, 0usize..6), 0..6),
        ) {
            let n = game.agent_count();
            let coalition = Coalition::from_mask(coalition_bits & low_mask(n)).with(AgentId(i % n));
            let agent = AgentId(i % n);
            // Rewrite relations whose subject or object is outside the coalition.
            let mut draft = game.to_builder();
            for (a, b) in outsider_edits {
                let (a, b) = (a % n, b % n);
                if a != b && (!coalition.contains(AgentId(a)) || !coalition.contains(AgentId(b))) {
                    draft.set(a, b, RelationKind::Friend);
                    draft.set(b, a, RelationKind::Friend);
                }
            }
            let edited = draft.symmetric(false).build().unwrap();
            let before = utility(&game, &all_enemies(&game), agent, coalition).unwrap();
            let after = utility(&edited, &all_enemies(&edited), agent, coalition).unwrap();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn more_friends_always_wins_in_friend_orientation(game in fixtures::arb_game_with(6, Orientation::FriendOriented)) {
            let n = game.agent_count();
            let res = all_enemies(&game);
            for i in 0..n {
                let mut by_friends: Vec<(u32, i64)> = Vec::new();
                for mask in 0..(1u64 << n) {
                    if mask & bit(i) == 0 { continue; }
                    let k = (mask & game.friend_mask(i)).count_ones();
                    let u = utility(&game, &res, AgentId(i), Coalition::from_mask(mask)).unwrap();
                    by_friends.push((k, u));
                }
                for &(k1, u1) in &by_friends {
                    for &(k2, u2) in &by_friends {
                        if k1 > k2 { prop_assert!(u1 > u2); }
                    }
                }
            }
        }

        #[test]
        fn fewer_enemies_always_wins_in_enemy_orientation(game in fixtures::arb_game_with(6, Orientation::EnemyOriented)) {
            let n = game.agent_count();
            let res = all_enemies(&game);
            for i in 0..n {
                let mut by_enemies: Vec<(u32, i64)> = Vec::new();
                for mask in 0..(1u64 << n) {
                    if mask & bit(i) == 0 { continue; }
                    let k = (mask & !game.friend_mask(i) & !bit(i)).count_ones();
                    let u = utility(&game, &res, AgentId(i), Coalition::from_mask(mask)).unwrap();
                    by_enemies.push((k, u));
                }
                for &(k1, u1) in &by_enemies {
                    for &(k2, u2) in &by_enemies {
                        if k1 < k2 { prop_assert!(u1 > u2); }
                    }
                }
            }
        }
    }

    #[test]
    fn outcome_weights_match_orientation() {
        let g = fixtures::mutual_strangers_pair(Orientation::FriendOriented);
        let both = g.grand_coalition();
        let friendly = crate::resolution::Resolution::from_fn(&g, |_, _| Outcome::Friendship);
        assert_eq!(utility(&g, &friendly, AgentId(0), both).unwrap(), 2);
        let g = fixtures::mutual_strangers_pair(Orientation::EnemyOriented);
        assert_eq!(utility(&g, &all_enemies(&g), AgentId(0), both).unwrap(), -2);
    }
}
